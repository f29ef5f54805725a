use crate::bernstein::BernsteinSurface;
use crate::error::{shape_err, Result};
use crate::Scalar;

/// All rod fields over a shared `[0, s_len] x [0, t_len]` domain and
/// shared degrees `(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RodFields<T> {
    /// Centerline position (m), 3-vector.
    pub r: BernsteinSurface<T>,
    /// Roll (rad), scalar.
    pub phi: BernsteinSurface<T>,
    /// Pitch (rad), scalar.
    pub theta: BernsteinSurface<T>,
    /// Yaw (rad), scalar.
    pub psi: BernsteinSurface<T>,
    /// Translational strain (dimensionless), body frame.
    pub l: BernsteinSurface<T>,
    /// Bending strain (rad per unit s), body frame.
    pub h: BernsteinSurface<T>,
    /// Velocity (m/s), body frame.
    pub v: BernsteinSurface<T>,
    /// Angular velocity (rad/s), body frame.
    pub omega: BernsteinSurface<T>,
}

impl<T: Scalar> RodFields<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        r: BernsteinSurface<T>,
        phi: BernsteinSurface<T>,
        theta: BernsteinSurface<T>,
        psi: BernsteinSurface<T>,
        l: BernsteinSurface<T>,
        h: BernsteinSurface<T>,
        v: BernsteinSurface<T>,
        omega: BernsteinSurface<T>,
    ) -> Result<Self> {
        let fields = Self { r, phi, theta, psi, l, h, v, omega };
        fields.validate()?;
        Ok(fields)
    }

    /// Every field equal to zero.
    pub fn zeros(m: usize, n: usize, s_len: T, t_len: T) -> Result<Self> {
        let vector = BernsteinSurface::zeros(m, n, s_len, t_len, 3)?;
        let scalar = BernsteinSurface::zeros(m, n, s_len, t_len, 1)?;
        Self::new(
            vector.clone(),
            scalar.clone(),
            scalar.clone(),
            scalar,
            vector.clone(),
            vector.clone(),
            vector.clone(),
            vector,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let reference = &self.r;
        for (name, f, dim) in self.named() {
            if f.dim() != dim {
                return shape_err(format!("field {name} has dim {}, expected {dim}", f.dim()));
            }
            if f.degrees() != reference.degrees() {
                return shape_err(format!("field {name} degrees {:?} differ from r {:?}", f.degrees(), reference.degrees()));
            }
            if f.s_length() != reference.s_length() || f.t_length() != reference.t_length() {
                return shape_err(format!("field {name} domain differs from r"));
            }
        }
        Ok(())
    }

    /// `(name, surface, dim)` in canonical order.
    pub fn named(&self) -> [(&'static str, &BernsteinSurface<T>, usize); 8] {
        [
            ("r", &self.r, 3),
            ("phi", &self.phi, 1),
            ("theta", &self.theta, 1),
            ("psi", &self.psi, 1),
            ("l", &self.l, 3),
            ("h", &self.h, 3),
            ("v", &self.v, 3),
            ("omega", &self.omega, 3),
        ]
    }

    pub fn named_mut(&mut self) -> [(&'static str, &mut BernsteinSurface<T>); 8] {
        [
            ("r", &mut self.r),
            ("phi", &mut self.phi),
            ("theta", &mut self.theta),
            ("psi", &mut self.psi),
            ("l", &mut self.l),
            ("h", &mut self.h),
            ("v", &mut self.v),
            ("omega", &mut self.omega),
        ]
    }

    pub fn degrees(&self) -> (usize, usize) {
        self.r.degrees()
    }

    pub fn s_length(&self) -> T {
        self.r.s_length()
    }

    pub fn t_length(&self) -> T {
        self.r.t_length()
    }

    /// Same nets over a new time horizon.
    pub fn with_t_length(&self, t_len: T) -> Result<Self> {
        let mut out = self.clone();
        for (_, f) in out.named_mut() {
            *f = f.with_t_length(t_len)?;
        }
        Ok(out)
    }

    /// Euler angles `(phi, theta, psi)` as one 3-vector surface.
    pub fn euler(&self) -> Result<BernsteinSurface<T>> {
        BernsteinSurface::from_components(&[&self.phi, &self.theta, &self.psi])
    }
}

/// Uniform tensor grid of collocation nodes, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid<T> {
    pub s_nodes: Vec<T>,
    pub t_nodes: Vec<T>,
}

impl<T: Scalar> CollocationGrid<T> {
    pub fn uniform(ns: usize, nt: usize, s_len: T, t_len: T) -> Result<Self> {
        if ns < 2 || nt < 2 {
            return shape_err(format!("collocation grid needs at least 2x2 nodes, got {ns}x{nt}"));
        }
        let line = |count: usize, len: T| -> Vec<T> {
            (0..count).map(|i| T::of_usize(i) / T::of_usize(count - 1) * len).collect()
        };
        Ok(Self { s_nodes: line(ns, s_len), t_nodes: line(nt, t_len) })
    }

    /// Default `(2m + 1) x (2n + 1)` grid.
    pub fn for_degrees(m: usize, n: usize, s_len: T, t_len: T) -> Result<Self> {
        Self::uniform(2 * m + 1, 2 * n + 1, s_len, t_len)
    }

    pub fn len(&self) -> usize {
        self.s_nodes.len() * self.t_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rejects grids too coarse for the given degrees.
    pub fn check_degrees(&self, m: usize, n: usize) -> Result<()> {
        if self.s_nodes.len() < m + 1 || self.t_nodes.len() < n + 1 {
            return shape_err(format!(
                "grid {}x{} too coarse for degrees ({m}, {n})",
                self.s_nodes.len(),
                self.t_nodes.len()
            ));
        }
        Ok(())
    }
}
