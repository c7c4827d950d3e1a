//! Unit-area flat tori, their dual lattices and Laplace spectra.
//!
//! A torus is stored through a unit-area basis `(omega1, omega2)` of its
//! period lattice, written as complex numbers in the caller's frame. For the
//! rectangle `[-a, a] x [0, 2 pi]` with metric `(1 / 4 pi a) * Euclidean`
//! the caller's frame is the rectangle frame scaled by `1 / sqrt(4 pi a)`, so
//! `x1` runs along the real axis.
//!
//! Eigenvalues follow the convention `lambda = 4 pi^2 |xi|^2` over the
//! nonzero dual-lattice vectors `xi` of the unit-area lattice.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{reduce_modulus, ComplexModulus};

/// A point of the plane, in unit-area coordinates of a torus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub(crate) fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// A unit-area flat torus.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusShape {
    basis: [Complex64; 2],
    tau: ComplexModulus,
    reduced: ComplexModulus,
    reduction: [i64; 4],
    // multiplies caller-frame coordinates into the reduced frame
    frame: Complex64,
    rect_param: Option<f64>,
    twist: f64,
}

/// Skinny/fat classification by the first nonzero eigenvalue against `8 pi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorusClass {
    Skinny,
    Fat,
    Borderline,
}

impl std::fmt::Display for TorusClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TorusClass::Skinny => "skinny",
            TorusClass::Fat => "fat",
            TorusClass::Borderline => "borderline",
        };
        f.write_str(s)
    }
}

/// Default half-width of the borderline band around `8 pi`.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

/// Default cap on the number of eigenvalues a single enumeration may produce.
pub const DEFAULT_EIGEN_LIMIT: usize = 20_000_000;

impl TorusShape {
    fn from_basis(basis: [Complex64; 2], rect_param: Option<f64>, twist: f64) -> Result<Self> {
        let t = basis[1] / basis[0];
        let tau = ComplexModulus::new(t.re, t.im)?;
        // normalize to unit co-area, keeping the caller's orientation
        let area = (basis[0].conj() * basis[1]).im;
        let s = 1.0 / area.sqrt();
        let basis = [basis[0] * s, basis[1] * s];

        let red = reduce_modulus(tau);
        let [_, _, c, d] = red.matrix;
        // (omega1', omega2') = (c omega2 + d omega1, a omega2 + b omega1)
        let w1 = basis[1] * c as f64 + basis[0] * d as f64;
        let frame = w1.norm() / w1;
        let reduced = ComplexModulus::new(red.reduced.re, red.reduced.im.max(f64::MIN_POSITIVE))?;
        Ok(TorusShape {
            basis,
            tau,
            reduced,
            reduction: red.matrix,
            frame,
            rect_param,
            twist,
        })
    }

    /// The modulus as given by the caller.
    pub fn tau(&self) -> ComplexModulus {
        self.tau
    }

    /// The modulus reduced into `|Re| <= 1/2, |tau| >= 1`.
    pub fn reduced_tau(&self) -> ComplexModulus {
        self.reduced
    }

    /// SL(2, Z) matrix `[a, b, c, d]` taking `tau` to the reduced modulus.
    pub fn reduction_matrix(&self) -> [i64; 4] {
        self.reduction
    }

    /// Rectangle half-length `a` when the torus was built from a rectangle.
    pub fn rect_param(&self) -> Option<f64> {
        self.rect_param
    }

    /// Twist applied when gluing a rectangle (zero for plain rectangles).
    pub fn twist(&self) -> f64 {
        self.twist
    }

    /// Unit-area lattice basis in the caller's frame.
    pub fn basis(&self) -> [Point; 2] {
        [
            Point::new(self.basis[0].re, self.basis[0].im),
            Point::new(self.basis[1].re, self.basis[1].im),
        ]
    }

    /// Co-area of the stored lattice basis (one up to rounding).
    pub fn co_area(&self) -> f64 {
        (self.basis[0].conj() * self.basis[1]).im
    }

    /// Unit-area basis `(1, tau') / sqrt(Im tau')` of the reduced lattice.
    pub fn reduced_basis(&self) -> [Complex64; 2] {
        let y = self.reduced.im;
        let s = 1.0 / y.sqrt();
        [Complex64::new(s, 0.0), self.reduced.to_complex() * s]
    }

    /// Map a caller-frame displacement into the reduced frame.
    pub(crate) fn to_reduced_frame(&self, p: Complex64) -> Complex64 {
        p * self.frame
    }

    /// Map rectangle coordinates `(x1, x2)` to caller-frame unit-area
    /// coordinates. Only meaningful for rectangle-built shapes.
    pub fn point_from_rect(&self, x1: f64, x2: f64) -> Result<Point> {
        let a = self
            .rect_param
            .ok_or_else(|| Error::precondition("torus was not built from a rectangle"))?;
        let s = 1.0 / (4.0 * PI * a).sqrt();
        Ok(Point::new(x1 * s, x2 * s))
    }

    /// Dual basis of the reduced lattice, as real 2-vectors.
    fn reduced_dual(&self) -> [[f64; 2]; 2] {
        let [w1, w2] = self.reduced_basis();
        // B = [w1 w2] (columns); dual = B^{-T}
        let det = w1.re * w2.im - w2.re * w1.im;
        [[w2.im / det, -w2.re / det], [-w1.im / det, w1.re / det]]
    }

    /// Shortest flat distance between two caller-frame points.
    pub fn distance(&self, x: Point, y: Point) -> f64 {
        self.wrap_displacement(y.to_complex() - x.to_complex()).norm()
    }

    /// Shortest representative of a caller-frame displacement, returned in the
    /// reduced frame.
    pub(crate) fn wrap_displacement(&self, d: Complex64) -> Complex64 {
        self.wrap_reduced(self.to_reduced_frame(d))
    }

    /// Shortest representative of a displacement already in the reduced frame.
    pub(crate) fn wrap_reduced(&self, v: Complex64) -> Complex64 {
        let [w1, w2] = self.reduced_basis();
        // lattice coordinates in the reduced basis
        let det = w1.re * w2.im - w2.re * w1.im;
        let s = (v.re * w2.im - w2.re * v.im) / det;
        let t = (w1.re * v.im - v.re * w1.im) / det;
        let base = v - w1 * s.round() - w2 * t.round();
        let mut best = base;
        for i in -1..=1 {
            for j in -1..=1 {
                let c = base + w1 * i as f64 + w2 * j as f64;
                if c.norm_sqr() < best.norm_sqr() {
                    best = c;
                }
            }
        }
        best
    }

    /// Injectivity radius: half the length of the shortest closed geodesic.
    pub fn injectivity_radius(&self) -> f64 {
        0.5 / self.reduced.im.sqrt()
    }

    /// Largest distance from any point to the lattice (covering radius).
    pub fn covering_radius(&self) -> f64 {
        // circumradius of the triangle (0, w1, w2) of the reduced basis
        let [w1, w2] = self.reduced_basis();
        let a = w1.norm();
        let b = w2.norm();
        let c = (w2 - w1).norm();
        let area2 = (w1.re * w2.im - w1.im * w2.re).abs();
        a * b * c / (2.0 * area2)
    }
}

/// Build the unit-area torus with modulus `tau_re + i tau_im`.
pub fn make_torus(tau_re: f64, tau_im: f64) -> Result<TorusShape> {
    let tau = ComplexModulus::new(tau_re, tau_im)?;
    TorusShape::from_basis([Complex64::new(1.0, 0.0), tau.to_complex()], None, 0.0)
}

/// The rectangle `[-a, a] x [0, 2 pi]` with metric `(1 / 4 pi a) Euclidean`;
/// its modulus is `i pi / a`.
pub fn make_rect_torus(a: f64) -> Result<TorusShape> {
    make_twisted_rect_torus(a, 0.0)
}

/// The rectangle of [`make_rect_torus`] glued with a meridional twist: the
/// lattice is spanned by `(0, 2 pi)` and `(2a, 2 pi twist)`.
pub fn make_twisted_rect_torus(a: f64, twist: f64) -> Result<TorusShape> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("rectangle parameter must be positive, got {a}")));
    }
    if !twist.is_finite() {
        return Err(Error::domain("twist must be finite"));
    }
    let s = 1.0 / (4.0 * PI * a).sqrt();
    let long = Complex64::new(2.0 * a, 2.0 * PI * twist) * s;
    let short = Complex64::new(0.0, 2.0 * PI) * s;
    TorusShape::from_basis([long, short], Some(a), twist)
}

/// Hexagonal torus, modulus `1/2 + i sqrt(3)/2`.
pub fn make_hex_torus() -> TorusShape {
    make_torus(0.5, 3f64.sqrt() / 2.0).expect("hexagonal modulus is valid")
}

/// Eigenvalues of the positive Laplacian below a cutoff, with multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    pub values: Vec<f64>,
    /// Dual-lattice index `(m, n)` in the reduced dual basis, per value.
    pub indices: Vec<(i64, i64)>,
    pub cutoff: f64,
}

impl EigenvalueList {
    pub fn count(&self) -> usize {
        self.values.len()
    }
}

/// All nonzero eigenvalues `<= cutoff`.
pub fn eigenvalues(shape: &TorusShape, cutoff: f64) -> Result<EigenvalueList> {
    eigenvalues_with_limit(shape, cutoff, DEFAULT_EIGEN_LIMIT)
}

pub fn eigenvalues_with_limit(shape: &TorusShape, cutoff: f64, limit: usize) -> Result<EigenvalueList> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::domain(format!("cutoff must be positive, got {cutoff}")));
    }
    // Weyl: about cutoff / (4 pi) eigenvalues for unit area
    let estimate = cutoff / (4.0 * PI);
    if estimate > limit as f64 {
        return Err(Error::Resource(format!(
            "cutoff {cutoff} yields about {estimate:.0} eigenvalues, limit is {limit}"
        )));
    }
    let [d1, d2] = shape.reduced_dual();
    let qa = d1[0] * d1[0] + d1[1] * d1[1];
    let qb = d1[0] * d2[0] + d1[1] * d2[1];
    let qc = d2[0] * d2[0] + d2[1] * d2[1];
    let r2 = cutoff / (4.0 * PI * PI);
    let disc_form = qa * qc - qb * qb;
    let nmax = (r2 * qa / disc_form).sqrt().floor() as i64 + 1;
    let mut entries: Vec<(f64, i64, i64)> = Vec::new();
    for n in -nmax..=nmax {
        let nf = n as f64;
        // qa m^2 + 2 qb n m + qc n^2 <= r2
        let disc = qb * qb * nf * nf - qa * (qc * nf * nf - r2);
        if disc < 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        let lo = ((-qb * nf - sq) / qa).floor() as i64 - 1;
        let hi = ((-qb * nf + sq) / qa).ceil() as i64 + 1;
        for m in lo..=hi {
            if m == 0 && n == 0 {
                continue;
            }
            let mf = m as f64;
            let xi0 = mf * d1[0] + nf * d2[0];
            let xi1 = mf * d1[1] + nf * d2[1];
            let lambda = 4.0 * PI * PI * (xi0 * xi0 + xi1 * xi1);
            if lambda <= cutoff {
                entries.push((lambda, m, n));
                if entries.len() > limit {
                    return Err(Error::Resource(format!(
                        "eigenvalue enumeration exceeded limit {limit}"
                    )));
                }
            }
        }
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    Ok(EigenvalueList {
        values: entries.iter().map(|e| e.0).collect(),
        indices: entries.iter().map(|e| (e.1, e.2)).collect(),
        cutoff,
    })
}

/// First nonzero eigenvalue.
pub fn lambda1(shape: &TorusShape) -> f64 {
    let [d1, d2] = shape.reduced_dual();
    let l1 = d1[0] * d1[0] + d1[1] * d1[1];
    let l2 = d2[0] * d2[0] + d2[1] * d2[1];
    let cutoff = 4.0 * PI * PI * l1.min(l2) * (1.0 + 1e-9);
    let list = eigenvalues(shape, cutoff).expect("cutoff around the shortest dual vector is small");
    list.values[0]
}

/// Classify with the default tolerance.
pub fn classify(shape: &TorusShape) -> TorusClass {
    classify_with_tol(shape, DEFAULT_CLASSIFY_TOL)
}

pub fn classify_with_tol(shape: &TorusShape, tol: f64) -> TorusClass {
    let l = lambda1(shape);
    let threshold = 8.0 * PI;
    if l < threshold - tol {
        TorusClass::Skinny
    } else if l > threshold + tol {
        TorusClass::Fat
    } else {
        TorusClass::Borderline
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_torus_has_unit_coarea_and_fourfold_lambda1() {
        let sq = make_torus(0.0, 1.0).unwrap();
        assert!((sq.co_area() - 1.0).abs() < 1e-12);
        let ev = eigenvalues(&sq, 4.0 * PI * PI * 1.5).unwrap();
        assert_eq!(ev.count(), 4);
        for v in &ev.values {
            assert!((v - 4.0 * PI * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn rect_torus_sides_and_modulus() {
        let r = make_rect_torus(10.0).unwrap();
        assert!((r.co_area() - 1.0).abs() < 1e-12);
        let [w1, w2] = r.basis();
        assert!((w1.x - (10.0 / PI).sqrt()).abs() < 1e-12 && w1.y.abs() < 1e-15);
        assert!((w2.y - (PI / 10.0).sqrt()).abs() < 1e-12 && w2.x.abs() < 1e-15);
        // side lengths multiply to the area
        assert!((w1.x * w2.y - 1.0).abs() < 1e-12);
        let t = make_rect_torus(40.0).unwrap().tau();
        assert!(t.re.abs() < 1e-15 && (t.im - PI / 40.0).abs() < 1e-15);
    }

    #[test]
    fn rect_pi_is_the_unit_square() {
        let r = make_rect_torus(PI).unwrap();
        let [w1, w2] = r.basis();
        assert!((w1.x - 1.0).abs() < 1e-15 && (w2.y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rect_from_modulus_matches_rect_constructor() {
        let a = make_torus(0.0, PI / 10.0).unwrap();
        let b = make_rect_torus(10.0).unwrap();
        let ba = a.basis();
        let bb = b.basis();
        for i in 0..2 {
            assert!((ba[i].x - bb[i].x).abs() < 1e-12);
            assert!((ba[i].y - bb[i].y).abs() < 1e-12);
        }
    }

    #[test]
    fn rect_lambda1_and_classification() {
        let r = make_rect_torus(10.0).unwrap();
        assert!((lambda1(&r) - 4.0 * PI.powi(3) / 10.0).abs() < 1e-12);
        assert_eq!(classify(&r), TorusClass::Skinny);
        assert_eq!(classify(&make_torus(0.0, 1.0).unwrap()), TorusClass::Fat);
        assert_eq!(classify(&make_hex_torus()), TorusClass::Fat);
    }

    #[test]
    fn borderline_band() {
        // lambda1 = 4 pi^3 / a equals 8 pi at a = pi^2 / 2
        let r = make_rect_torus(PI * PI / 2.0).unwrap();
        assert_eq!(classify(&r), TorusClass::Borderline);
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(make_torus(0.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(make_rect_torus(-1.0), Err(Error::Domain(_))));
        let sq = make_torus(0.0, 1.0).unwrap();
        assert!(matches!(eigenvalues(&sq, 0.0), Err(Error::Domain(_))));
        assert!(matches!(
            eigenvalues_with_limit(&sq, 1e6, 100),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn zero_is_never_listed() {
        let ev = eigenvalues(&make_hex_torus(), 2000.0).unwrap();
        assert!(ev.values.iter().all(|&v| v > 0.0));
        assert!(ev.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn twisted_rect_matches_modulus_form() {
        let t = make_twisted_rect_torus(10.0, 0.3).unwrap();
        let u = make_torus(0.3, 10.0 / PI).unwrap();
        let a = eigenvalues(&t, 500.0).unwrap().values;
        let b = eigenvalues(&u, 500.0).unwrap().values;
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn distance_wraps_around() {
        let sq = make_torus(0.0, 1.0).unwrap();
        let d = sq.distance(Point::new(0.05, 0.0), Point::new(0.95, 0.0));
        assert!((d - 0.1).abs() < 1e-14);
        let r = make_rect_torus(10.0).unwrap();
        let p = r.point_from_rect(-9.9, 0.0).unwrap();
        let q = r.point_from_rect(9.9, 6.2).unwrap();
        let expect = ((0.2f64).powi(2) + (2.0 * PI - 6.2).powi(2)).sqrt() / (40.0 * PI).sqrt();
        assert!((r.distance(p, q) - expect).abs() < 1e-13);
    }
}
