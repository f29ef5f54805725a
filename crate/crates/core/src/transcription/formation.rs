use nalgebra::{DMatrix, DVector};

use super::scenario::{FormationKind, FormationSpec, Parameterization};
use crate::bernstein::basis_row;
use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

const ARC_PANELS: usize = 512;

// 5-point Gauss-Legendre on [-1, 1]
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Ellipse { center: Vec3<f64>, a: f64, b: f64, axis1: Vec3<f64>, axis2: Vec3<f64> },
    Helix { center: Vec3<f64>, axis: Vec3<f64>, e1: Vec3<f64>, e2: Vec3<f64>, radius: f64, rise: f64 },
}

impl Shape {
    fn point(&self, th: f64) -> Vec3<f64> {
        match self {
            Shape::Ellipse { center, a, b, axis1, axis2 } => {
                let (s, c) = th.sin_cos();
                vec3::add(vec3::add(*center, vec3::scale(*axis1, a * c)), vec3::scale(*axis2, b * s))
            }
            Shape::Helix { center, axis, e1, e2, radius, rise } => {
                let (s, c) = th.sin_cos();
                let ring = vec3::add(vec3::scale(*e1, radius * c), vec3::scale(*e2, radius * s));
                vec3::add(vec3::add(*center, ring), vec3::scale(*axis, rise * th))
            }
        }
    }

    fn speed(&self, th: f64) -> f64 {
        let (s, c) = th.sin_cos();
        let d = match self {
            Shape::Ellipse { a, b, axis1, axis2, .. } => vec3::add(vec3::scale(*axis1, -a * s), vec3::scale(*axis2, b * c)),
            Shape::Helix { axis, e1, e2, radius, rise, .. } => vec3::add(
                vec3::add(vec3::scale(*e1, -radius * s), vec3::scale(*e2, radius * c)),
                vec3::scale(*axis, *rise),
            ),
        };
        vec3::norm(d)
    }

    fn arc(&self, a: f64, b: f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        half * GL_NODES.iter().zip(GL_WEIGHTS).map(|(x, w)| w * self.speed(mid + half * x)).sum::<f64>()
    }
}

/// Cumulative arclength table for inverting the arclength parameterization.
#[derive(Debug, Clone, PartialEq)]
struct ArcTable {
    params: Vec<f64>,
    lengths: Vec<f64>,
}

impl ArcTable {
    fn new(shape: &Shape, lo: f64, hi: f64) -> Self {
        let params: Vec<f64> = (0..=ARC_PANELS).map(|k| lo + (hi - lo) * k as f64 / ARC_PANELS as f64).collect();
        let mut lengths = vec![0.0; ARC_PANELS + 1];
        for k in 0..ARC_PANELS {
            lengths[k + 1] = lengths[k] + shape.arc(params[k], params[k + 1]);
        }
        Self { params, lengths }
    }

    fn total(&self) -> f64 {
        *self.lengths.last().expect("table is nonempty")
    }

    /// Parameter at which the arclength from the start equals `target`.
    fn invert(&self, shape: &Shape, target: f64) -> f64 {
        let k = match self.lengths.binary_search_by(|v| v.partial_cmp(&target).expect("finite")) {
            Ok(k) => return self.params[k],
            Err(k) => k.clamp(1, ARC_PANELS) - 1,
        };
        let (mut a, mut b) = (self.params[k], self.params[k + 1]);
        let base = self.lengths[k];
        let mut th = a + (b - a) * (target - base) / (self.lengths[k + 1] - base);
        for _ in 0..60 {
            let f = base + shape.arc(self.params[k], th) - target;
            if f.abs() <= 1e-15 * self.total().max(1.0) {
                break;
            }
            if f > 0.0 {
                b = th;
            } else {
                a = th;
            }
            let next = th - f / shape.speed(th);
            th = if next > a && next < b { next } else { 0.5 * (a + b) };
        }
        th
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Line { origin: Vec3<f64>, direction: Vec3<f64> },
    Parametric { shape: Shape, range: [f64; 2], reverse: bool, arc: Option<ArcTable> },
    Points { s: Vec<f64>, points: Vec<Vec3<f64>> },
}

/// A formation curve as a function of rod coordinate `s` in `[0, s_length]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetCurve {
    s_length: f64,
    kind: Kind,
}

fn unit(v: Vec3<f64>) -> Vec3<f64> {
    vec3::scale(v, 1.0 / vec3::norm(v))
}

fn missing(key: &str) -> Error {
    Error::Validation(vec![format!("formation is missing `{key}`")])
}

impl TargetCurve {
    /// Builds the curve from a validated formation description.
    pub fn from_spec(spec: &FormationSpec, s_length: f64) -> Result<Self> {
        let kind = match spec.kind {
            FormationKind::Line => Kind::Line {
                origin: spec.origin.ok_or_else(|| missing("origin"))?,
                direction: spec.direction.ok_or_else(|| missing("direction"))?,
            },
            FormationKind::Ellipse | FormationKind::Helix => {
                let shape = if spec.kind == FormationKind::Ellipse {
                    let [a, b] = spec.semi_axes.ok_or_else(|| missing("semi_axes"))?;
                    Shape::Ellipse {
                        center: spec.center.ok_or_else(|| missing("center"))?,
                        a,
                        b,
                        axis1: spec.axis1.ok_or_else(|| missing("axis1"))?,
                        axis2: spec.axis2.ok_or_else(|| missing("axis2"))?,
                    }
                } else {
                    let axis = unit(spec.axis.ok_or_else(|| missing("axis"))?);
                    // seed the ring basis with the coordinate axis least aligned with the helix axis
                    let k = (0..3)
                        .min_by(|&i, &j| axis[i].abs().partial_cmp(&axis[j].abs()).expect("finite"))
                        .expect("three axes");
                    let mut helper = [0.0; 3];
                    helper[k] = 1.0;
                    let e1 = unit(vec3::sub(helper, vec3::scale(axis, vec3::dot(helper, axis))));
                    let e2 = vec3::cross(axis, e1);
                    let pitch = spec.pitch.ok_or_else(|| missing("pitch"))?;
                    Shape::Helix {
                        center: spec.center.ok_or_else(|| missing("center"))?,
                        axis,
                        e1,
                        e2,
                        radius: spec.radius.ok_or_else(|| missing("radius"))?,
                        rise: pitch / (2.0 * std::f64::consts::PI),
                    }
                };
                let range = spec.parameter_range.ok_or_else(|| missing("parameter_range"))?;
                let arc = match spec.parameterization.unwrap_or_default() {
                    Parameterization::Uniform => None,
                    Parameterization::ArcLength => Some(ArcTable::new(&shape, range[0], range[1])),
                };
                Kind::Parametric { shape, range, reverse: spec.reverse.unwrap_or(false), arc }
            }
            FormationKind::Points => {
                let points = spec.points.clone().ok_or_else(|| missing("points"))?;
                let s = match &spec.s_values {
                    Some(s) => s.clone(),
                    None => {
                        let last = (points.len() - 1) as f64;
                        (0..points.len()).map(|k| s_length * k as f64 / last).collect()
                    }
                };
                Kind::Points { s, points }
            }
        };
        Ok(Self { s_length, kind })
    }

    pub fn s_length(&self) -> f64 {
        self.s_length
    }

    /// Whether the curve is a polynomial of degree at most one in `s`.
    pub fn is_linear(&self) -> bool {
        matches!(self.kind, Kind::Line { .. })
    }

    /// Formation point at rod coordinate `s` (clamped to the rod).
    pub fn point(&self, s: f64) -> Vec3<f64> {
        let s = s.clamp(0.0, self.s_length);
        match &self.kind {
            Kind::Line { origin, direction } => vec3::add(*origin, vec3::scale(*direction, s)),
            Kind::Parametric { shape, range, reverse, arc } => {
                let mut f = s / self.s_length;
                if *reverse {
                    f = 1.0 - f;
                }
                let th = match arc {
                    None => range[0] + f * (range[1] - range[0]),
                    Some(table) => table.invert(shape, f * table.total()),
                };
                shape.point(th)
            }
            Kind::Points { s: knots, points } => {
                let k = knots.partition_point(|&v| v <= s).clamp(1, knots.len() - 1);
                let (s0, s1) = (knots[k - 1], knots[k]);
                let a = (s - s0) / (s1 - s0);
                vec3::add(vec3::scale(points[k - 1], 1.0 - a), vec3::scale(points[k], a))
            }
        }
    }

    /// Uniform interpolation nodes `s_k = k s_length / m`.
    pub fn nodes(&self, m: usize) -> Vec<f64> {
        (0..=m).map(|k| self.s_length * k as f64 / m as f64).collect()
    }

    /// Degree-`m` Bernstein coefficients of the edge: exact for lines,
    /// otherwise the interpolant through the `m + 1` uniform nodes.
    pub fn edge_coefficients(&self, m: usize) -> Result<Vec<Vec3<f64>>> {
        if let Kind::Line { origin, direction } = &self.kind {
            return Ok((0..=m)
                .map(|i| vec3::add(*origin, vec3::scale(*direction, self.s_length * i as f64 / m as f64)))
                .collect());
        }
        let nodes = self.nodes(m);
        let vander = DMatrix::from_fn(m + 1, m + 1, |k, i| basis_row::<f64>(m, nodes[k] / self.s_length)[i]);
        let lu = vander.lu();
        let mut out = vec![[0.0; 3]; m + 1];
        for c in 0..3 {
            let rhs = DVector::from_fn(m + 1, |k, _| self.point(nodes[k])[c]);
            let sol = lu
                .solve(&rhs)
                .ok_or_else(|| Error::Domain(format!("singular interpolation system at degree {m}")))?;
            for i in 0..=m {
                out[i][c] = sol[i];
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn ellipse(param: Parameterization, reverse: bool) -> FormationSpec {
        FormationSpec {
            kind: FormationKind::Ellipse,
            center: Some([0.1, 0.1, 0.1]),
            semi_axes: Some([0.2, 0.1]),
            axis1: Some([0.53, 0.26, 0.80]),
            axis2: Some([0.45, -0.89, 0.0]),
            parameter_range: Some([0.0, FRAC_PI_2]),
            parameterization: Some(param),
            reverse: Some(reverse),
            ..FormationSpec::line([0.0; 3], [0.0, 0.0, 1.0])
        }
        .without_line_keys()
    }

    impl FormationSpec {
        fn without_line_keys(mut self) -> Self {
            self.origin = None;
            self.direction = None;
            self
        }
    }

    #[test]
    fn line_coefficients_are_exact() {
        let c = TargetCurve::from_spec(&FormationSpec::line([0.0; 3], [0.0, 0.0, 1.0]), 0.24).unwrap();
        let coeffs = c.edge_coefficients(6).unwrap();
        for (i, p) in coeffs.iter().enumerate() {
            assert_eq!(*p, [0.0, 0.0, 0.24 * i as f64 / 6.0]);
        }
    }

    #[test]
    fn ellipse_endpoints_follow_orientation() {
        let fwd = TargetCurve::from_spec(&ellipse(Parameterization::Uniform, false), 0.24).unwrap();
        let p0 = fwd.point(0.0);
        let expected = [0.1 + 0.2 * 0.53, 0.1 + 0.2 * 0.26, 0.1 + 0.2 * 0.80];
        for k in 0..3 {
            assert!((p0[k] - expected[k]).abs() < 1e-15);
        }
        let rev = TargetCurve::from_spec(&ellipse(Parameterization::ArcLength, true), 0.24).unwrap();
        let q = rev.point(0.24);
        for k in 0..3 {
            assert!((q[k] - expected[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn arclength_points_are_equally_spaced() {
        let c = TargetCurve::from_spec(&ellipse(Parameterization::ArcLength, true), 0.24).unwrap();
        let k = 2000;
        let pts: Vec<_> = (0..=k).map(|i| c.point(0.24 * i as f64 / k as f64)).collect();
        let steps: Vec<f64> = pts.windows(2).map(|w| vec3::norm(vec3::sub(w[1], w[0]))).collect();
        let (lo, hi) = steps.iter().fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!((hi - lo) / hi < 1e-6, "{lo} {hi}");
        let total: f64 = steps.iter().sum();
        assert!((total - 0.24053).abs() < 1e-4, "{total}");
    }

    #[test]
    fn helix_geometry() {
        let spec = FormationSpec {
            kind: FormationKind::Helix,
            center: Some([0.0; 3]),
            axis: Some([0.0, 0.0, 2.0]),
            radius: Some(0.01),
            pitch: Some(0.02 * std::f64::consts::PI),
            parameter_range: Some([0.0, 2.0 * std::f64::consts::PI]),
            ..FormationSpec::line([0.0; 3], [0.0; 3])
        }
        .without_line_keys();
        let c = TargetCurve::from_spec(&spec, 1.0).unwrap();
        let p = c.point(0.25);
        assert!((p[0]).abs() < 1e-15 && (p[1] - 0.01).abs() < 1e-15);
        assert!((p[2] - 0.005 * std::f64::consts::PI).abs() < 1e-15);
        let end = c.point(1.0);
        assert!((end[2] - 0.02 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn points_interpolate_linearly() {
        let mut spec = FormationSpec::line([0.0; 3], [0.0; 3]).without_line_keys();
        spec.kind = FormationKind::Points;
        spec.points = Some(vec![[0.0; 3], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]);
        let c = TargetCurve::from_spec(&spec, 2.0).unwrap();
        assert_eq!(c.point(0.5), [0.5, 0.0, 0.0]);
        assert_eq!(c.point(1.5), [1.0, 0.5, 0.0]);
        assert_eq!(c.point(2.0), [1.0, 1.0, 0.0]);
    }

    #[test]
    fn interpolant_hits_nodes() {
        let c = TargetCurve::from_spec(&ellipse(Parameterization::ArcLength, true), 0.24).unwrap();
        let coeffs = c.edge_coefficients(6).unwrap();
        for &s in &c.nodes(6) {
            let b = basis_row::<f64>(6, s / 0.24);
            let target = c.point(s);
            for k in 0..3 {
                let v: f64 = (0..=6).map(|i| b[i] * coeffs[i][k]).sum();
                assert!((v - target[k]).abs() < 1e-13);
            }
        }
    }
}
