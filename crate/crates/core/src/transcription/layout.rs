use crate::bernstein::BernsteinSurface;
use crate::cosserat::RodFields;
use crate::error::{shape_err, Result};

/// Scalar nets in packing order: `r` (3), roll, pitch, yaw, `l` (3), `h` (3), `v` (3), `omega` (3).
pub const SCALAR_NETS: usize = 18;

pub const R: usize = 0;
pub const PHI: usize = 3;
pub const THETA: usize = 4;
pub const PSI: usize = 5;
pub const L: usize = 6;
pub const H: usize = 9;
pub const V: usize = 12;
pub const OMEGA: usize = 15;

/// Position of every control point in the decision vector.
///
/// Each scalar net occupies `(m+1)(n+1)` consecutive slots in row-major
/// order (`i` over `s`, `j` over `t`); the final time comes last.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub m: usize,
    pub n: usize,
}

impl Layout {
    pub fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }

    pub fn net_len(&self) -> usize {
        (self.m + 1) * (self.n + 1)
    }

    pub fn len(&self) -> usize {
        SCALAR_NETS * self.net_len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of control point `(i, j)` of scalar net `net`.
    #[inline]
    pub fn index(&self, net: usize, i: usize, j: usize) -> usize {
        net * self.net_len() + i * (self.n + 1) + j
    }

    pub fn net<'a>(&self, x: &'a [f64], net: usize) -> &'a [f64] {
        &x[net * self.net_len()..(net + 1) * self.net_len()]
    }

    pub fn net_mut<'a>(&self, x: &'a mut [f64], net: usize) -> &'a mut [f64] {
        let len = self.net_len();
        &mut x[net * len..(net + 1) * len]
    }

    pub fn t_final_index(&self) -> usize {
        SCALAR_NETS * self.net_len()
    }
}

fn fields_in_order(fields: &RodFields<f64>) -> [&BernsteinSurface<f64>; 8] {
    [&fields.r, &fields.phi, &fields.theta, &fields.psi, &fields.l, &fields.h, &fields.v, &fields.omega]
}

/// Flattens the control nets and the final time into a decision vector.
pub fn pack(fields: &RodFields<f64>, t_final: f64) -> Result<Vec<f64>> {
    fields.validate()?;
    let (m, n) = fields.degrees();
    let layout = Layout::new(m, n);
    let mut x = Vec::with_capacity(layout.len());
    for f in fields_in_order(fields) {
        let dim = f.dim();
        for k in 0..dim {
            x.extend(f.net().iter().skip(k).step_by(dim));
        }
    }
    x.push(t_final);
    Ok(x)
}

/// Inverse of [`pack`]; the surfaces live on `[0, s_length] x [0, t_final]`.
pub fn unpack(x: &[f64], layout: Layout, s_length: f64) -> Result<(RodFields<f64>, f64)> {
    if x.len() != layout.len() {
        return shape_err(format!(
            "decision vector has {} entries, layout ({}, {}) needs {}",
            x.len(),
            layout.m,
            layout.n,
            layout.len()
        ));
    }
    let t_final = x[layout.t_final_index()];
    let build = |first: usize, dim: usize| -> Result<BernsteinSurface<f64>> {
        let len = layout.net_len();
        let mut net = vec![0.0; len * dim];
        for k in 0..dim {
            for (p, &v) in layout.net(x, first + k).iter().enumerate() {
                net[p * dim + k] = v;
            }
        }
        BernsteinSurface::new(layout.m, layout.n, s_length, t_final, dim, net)
    };
    let fields = RodFields::new(
        build(R, 3)?,
        build(PHI, 1)?,
        build(THETA, 1)?,
        build(PSI, 1)?,
        build(L, 3)?,
        build(H, 3)?,
        build(V, 3)?,
        build(OMEGA, 3)?,
    )?;
    Ok((fields, t_final))
}
