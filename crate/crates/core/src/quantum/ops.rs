use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{QuantumError, RingParams};

type Cq = Complex<BigRational>;

fn cq(re: BigRational, im: BigRational) -> Cq {
    Complex::new(re, im)
}

fn real(r: BigRational) -> Cq {
    cq(r, BigRational::zero())
}

fn imag(r: BigRational) -> Cq {
    cq(BigRational::zero(), r)
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// `sum_k c_k e^{i k theta}` with exact complex rational coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly(BTreeMap<i64, Cq>);

impl TrigPoly {
    pub fn constant(c: Cq) -> Self {
        let mut t = TrigPoly::default();
        t.add_term(0, c);
        t
    }

    pub fn cos() -> Self {
        let mut t = TrigPoly::default();
        t.add_term(1, real(half()));
        t.add_term(-1, real(half()));
        t
    }

    pub fn sin() -> Self {
        let mut t = TrigPoly::default();
        t.add_term(1, imag(-half()));
        t.add_term(-1, imag(half()));
        t
    }

    fn add_term(&mut self, k: i64, c: Cq) {
        let e = self.0.entry(k).or_insert_with(Cq::zero);
        *e = &*e + &c;
        if e.is_zero() {
            self.0.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coefficient(&self, k: i64) -> Cq {
        self.0.get(&k).cloned().unwrap_or_else(Cq::zero)
    }

    fn add(&self, o: &TrigPoly) -> TrigPoly {
        let mut r = self.clone();
        for (&k, c) in &o.0 {
            r.add_term(k, c.clone());
        }
        r
    }

    fn mul(&self, o: &TrigPoly) -> TrigPoly {
        let mut r = TrigPoly::default();
        for (&a, ca) in &self.0 {
            for (&b, cb) in &o.0 {
                r.add_term(a + b, ca * cb);
            }
        }
        r
    }

    fn scale(&self, s: &Cq) -> TrigPoly {
        let mut r = TrigPoly::default();
        for (&k, c) in &self.0 {
            r.add_term(k, c * s);
        }
        r
    }

    fn derivative(&self) -> TrigPoly {
        let mut r = TrigPoly::default();
        for (&k, c) in &self.0 {
            r.add_term(k, c * imag(BigRational::from_integer(k.into())));
        }
        r
    }
}

/// `sum_d f_d(theta) d^d/dtheta^d` on the circle.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiffOp(Vec<TrigPoly>);

impl DiffOp {
    pub fn multiply(f: TrigPoly) -> Self {
        DiffOp(vec![f]).trimmed()
    }

    pub fn constant(c: Cq) -> Self {
        Self::multiply(TrigPoly::constant(c))
    }

    /// `d/dtheta`.
    pub fn derivative() -> Self {
        DiffOp(vec![TrigPoly::default(), TrigPoly::constant(Cq::one())])
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(TrigPoly::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(TrigPoly::is_zero)
    }

    pub fn order(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn add(&self, o: &DiffOp) -> DiffOp {
        let n = self.0.len().max(o.0.len());
        let z = TrigPoly::default();
        DiffOp(
            (0..n)
                .map(|d| self.0.get(d).unwrap_or(&z).add(o.0.get(d).unwrap_or(&z)))
                .collect(),
        )
        .trimmed()
    }

    pub fn sub(&self, o: &DiffOp) -> DiffOp {
        self.add(&o.scale(&real(-BigRational::one())))
    }

    pub fn scale(&self, s: &Cq) -> DiffOp {
        DiffOp(self.0.iter().map(|f| f.scale(s)).collect()).trimmed()
    }

    /// `self * o` via `d^a g = sum_k C(a,k) g^(k) d^(a-k)`.
    pub fn compose(&self, o: &DiffOp) -> DiffOp {
        let mut out: Vec<TrigPoly> = vec![TrigPoly::default(); self.0.len() + o.0.len()];
        for (a, f) in self.0.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (b, g) in o.0.iter().enumerate() {
                let mut gk = g.clone();
                let mut binom = BigInt::one();
                for k in 0..=a {
                    if gk.is_zero() {
                        break;
                    }
                    let term = f
                        .mul(&gk)
                        .scale(&real(BigRational::from_integer(binom.clone())));
                    out[a - k + b] = out[a - k + b].add(&term);
                    binom = binom * BigInt::from(a - k) / BigInt::from(k + 1);
                    gk = gk.derivative();
                }
            }
        }
        DiffOp(out).trimmed()
    }

    /// `{a, b} = ab + ba`.
    pub fn anticommutator(&self, o: &DiffOp) -> DiffOp {
        self.compose(o).add(&o.compose(self))
    }

    /// `<m|op|n>` in the basis `e^{i(n+beta)theta}/sqrt(2 pi)`.
    pub fn matrix_element(&self, m: i64, n: i64, beta: &BigRational) -> Cq {
        let ik = imag(BigRational::from_integer(n.into()) + beta);
        let mut pow = Cq::one();
        let mut acc = Cq::zero();
        for f in &self.0 {
            let c = f.coefficient(m - n);
            if !c.is_zero() {
                acc = acc + c * &pow;
            }
            pow = &pow * &ik;
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    X,
    Y,
    Px,
    Py,
    Lz,
    H,
    Phi3W,
}

impl Operator {
    pub const ALL: [Operator; 7] = [
        Operator::X,
        Operator::Y,
        Operator::Px,
        Operator::Py,
        Operator::Lz,
        Operator::H,
        Operator::Phi3W,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operator::X => "x",
            Operator::Y => "y",
            Operator::Px => "px",
            Operator::Py => "py",
            Operator::Lz => "Lz",
            Operator::H => "H",
            Operator::Phi3W => "phi3W",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Operator::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s))
    }
}

/// Exact copies of the ring parameters.
pub(crate) struct Exact {
    pub r0: BigRational,
    pub m: BigRational,
    pub hbar: BigRational,
    pub alpha: BigRational,
}

impl Exact {
    pub(crate) fn new(p: &RingParams) -> Self {
        let q = |v: f64| BigRational::from_float(v).expect("validated finite");
        Exact {
            r0: q(p.r0),
            m: q(p.m),
            hbar: q(p.hbar),
            alpha: q(p.alpha),
        }
    }
}

/// The position, momentum and derived operators as exact differential operators.
pub struct RingOperators {
    pub x: DiffOp,
    pub y: DiffOp,
    pub px: DiffOp,
    pub py: DiffOp,
    pub lz: DiffOp,
    pub h: DiffOp,
    pub phi3w: DiffOp,
}

impl RingOperators {
    pub fn new(p: &RingParams) -> Self {
        let e = Exact::new(p);
        let i = || imag(BigRational::one());
        let d = DiffOp::derivative();
        let cos = DiffOp::multiply(TrigPoly::cos());
        let sin = DiffOp::multiply(TrigPoly::sin());
        let x = cos.scale(&real(e.r0.clone()));
        let y = sin.scale(&real(e.r0.clone()));
        let lz = d
            .scale(&imag(-e.hbar.clone()))
            .sub(&DiffOp::constant(real(&e.hbar * &e.alpha)));
        let k = real(&e.hbar / &e.r0);
        let px = sin
            .compose(&d)
            .scale(&i())
            .add(&cos.scale(&imag(half())))
            .add(&sin.scale(&real(e.alpha.clone())))
            .scale(&k);
        let py = cos
            .compose(&d)
            .scale(&imag(-BigRational::one()))
            .add(&sin.scale(&imag(half())))
            .sub(&cos.scale(&real(e.alpha.clone())))
            .scale(&k);
        let h = px
            .compose(&px)
            .add(&py.compose(&py))
            .scale(&real((BigRational::from_integer(2.into()) * &e.m).recip()));
        let phi3w = x
            .anticommutator(&px)
            .add(&y.anticommutator(&py))
            .scale(&real(half()));
        RingOperators {
            x,
            y,
            px,
            py,
            lz,
            h,
            phi3w,
        }
    }

    pub fn get(&self, op: Operator) -> &DiffOp {
        match op {
            Operator::X => &self.x,
            Operator::Y => &self.y,
            Operator::Px => &self.px,
            Operator::Py => &self.py,
            Operator::Lz => &self.lz,
            Operator::H => &self.h,
            Operator::Phi3W => &self.phi3w,
        }
    }
}

/// Truncated operator in the Fourier modes `n = -N..=N` (twisted by `beta`).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub truncation: usize,
    pub alpha: f64,
    pub beta: f64,
    data: Vec<Complex64>,
}

fn to_c64(c: &Cq) -> Complex64 {
    Complex64::new(
        c.re.to_f64().unwrap_or(f64::NAN),
        c.im.to_f64().unwrap_or(f64::NAN),
    )
}

impl OperatorMatrix {
    pub fn from_diffop(op: &DiffOp, p: &RingParams, truncation: usize) -> Self {
        let beta = BigRational::from_float(p.beta).expect("validated finite");
        let n = truncation as i64;
        let mut data = Vec::with_capacity((2 * truncation + 1).pow(2));
        for m in -n..=n {
            for k in -n..=n {
                data.push(to_c64(&op.matrix_element(m, k, &beta)));
            }
        }
        OperatorMatrix {
            truncation,
            alpha: p.alpha,
            beta: p.beta,
            data,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.truncation + 1
    }

    /// Entry at row mode `m`, column mode `n`, each in `-N..=N`.
    pub fn at(&self, m: i64, n: i64) -> Complex64 {
        let off = self.truncation as i64;
        self.data[((m + off) as usize) * self.dim() + (n + off) as usize]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim() + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.dim())
    }

    fn zip(
        &self,
        o: &OperatorMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> OperatorMatrix {
        OperatorMatrix {
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, o: &OperatorMatrix) -> OperatorMatrix {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &OperatorMatrix) -> OperatorMatrix {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> OperatorMatrix {
        OperatorMatrix {
            data: self.data.iter().map(|a| a * s).collect(),
            ..self.clone()
        }
    }

    pub fn identity_like(&self) -> OperatorMatrix {
        let n = self.dim();
        let data = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        OperatorMatrix {
            data,
            ..self.clone()
        }
    }

    pub fn mul(&self, o: &OperatorMatrix) -> OperatorMatrix {
        let n = self.dim();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * o.data[k * n + j];
                }
            }
        }
        OperatorMatrix {
            data,
            ..self.clone()
        }
    }

    pub fn commutator(&self, o: &OperatorMatrix) -> OperatorMatrix {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.norm()))
    }

    /// Largest `|a_mn|` over `|m|, |n| <= N - margin`.
    pub fn interior_max(&self, margin: usize) -> f64 {
        let lim = self.truncation.saturating_sub(margin) as i64;
        let mut best = 0.0f64;
        for m in -lim..=lim {
            for n in -lim..=lim {
                best = best.max(self.at(m, n).norm());
            }
        }
        best
    }

    /// `max |A - A^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                best = best.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        best
    }
}

fn check_truncation(n: usize, min: usize) -> Result<(), QuantumError> {
    if n < min {
        return Err(QuantumError::Truncation { min, got: n });
    }
    Ok(())
}

pub fn operator_matrix(
    which: Operator,
    p: &RingParams,
    truncation: usize,
) -> Result<OperatorMatrix, QuantumError> {
    check_truncation(truncation, 2)?;
    Ok(OperatorMatrix::from_diffop(
        RingOperators::new(p).get(which),
        p,
        truncation,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub truncation: usize,
    /// `max |A - A^dagger|` per operator.
    pub hermiticity: Vec<(String, f64)>,
    /// Interior max-norm of `commutator - right-hand side` per relation.
    pub relations: Vec<(String, f64)>,
    /// Max-norm of the Weyl-ordered radial constraint.
    pub phi3w: f64,
}

impl ResidualReport {
    pub fn max_relation(&self) -> f64 {
        self.relations.iter().fold(0.0, |m, r| m.max(r.1))
    }

    pub fn max_hermiticity(&self) -> f64 {
        self.hermiticity.iter().fold(0.0, |m, r| m.max(r.1))
    }
}

pub fn algebra_residuals(
    p: &RingParams,
    truncation: usize,
) -> Result<ResidualReport, QuantumError> {
    check_truncation(truncation, 4)?;
    let ops = RingOperators::new(p);
    let mat = |o: Operator| OperatorMatrix::from_diffop(ops.get(o), p, truncation);
    let (x, y, px, py, lz, h) = (
        mat(Operator::X),
        mat(Operator::Y),
        mat(Operator::Px),
        mat(Operator::Py),
        mat(Operator::Lz),
        mat(Operator::H),
    );
    let phi3w = mat(Operator::Phi3W);

    let hermiticity = [
        ("x", &x),
        ("y", &y),
        ("px", &px),
        ("py", &py),
        ("Lz", &lz),
        ("H", &h),
    ]
    .iter()
    .map(|(n, m)| (n.to_string(), m.hermiticity_defect()))
    .collect();

    let ih = Complex64::new(0.0, p.hbar);
    let r2 = p.r0 * p.r0;
    let one = x.identity_like();
    let xx = x.mul(&x);
    let yy = y.mul(&y);
    let xy = x.mul(&y);
    let lzc = x.mul(&py).sub(&y.mul(&px));
    let rel = |lhs: OperatorMatrix, rhs: OperatorMatrix| lhs.sub(&rhs).interior_max(2);
    let relations = vec![
        (
            "[x,px] - i hbar (1 - x^2/r0^2)".to_string(),
            rel(
                x.commutator(&px),
                one.sub(&xx.scale((1.0 / r2).into())).scale(ih),
            ),
        ),
        (
            "[y,py] - i hbar (1 - y^2/r0^2)".to_string(),
            rel(
                y.commutator(&py),
                one.sub(&yy.scale((1.0 / r2).into())).scale(ih),
            ),
        ),
        (
            "[x,py] + i hbar x y/r0^2".to_string(),
            rel(x.commutator(&py), xy.scale(-ih / r2)),
        ),
        (
            "[y,px] + i hbar x y/r0^2".to_string(),
            rel(y.commutator(&px), xy.scale(-ih / r2)),
        ),
        (
            "[x,y]".to_string(),
            rel(x.commutator(&y), one.scale(0.0.into())),
        ),
        (
            "[px,py] + i hbar (x py - y px)/r0^2".to_string(),
            rel(px.commutator(&py), lzc.scale(-ih / r2)),
        ),
        (
            "[x,H] - i hbar px/m".to_string(),
            rel(x.commutator(&h), px.scale(ih / p.m)),
        ),
        (
            "[y,H] - i hbar py/m".to_string(),
            rel(y.commutator(&h), py.scale(ih / p.m)),
        ),
    ];
    Ok(ResidualReport {
        truncation,
        hermiticity,
        relations,
        phi3w: phi3w.max_norm(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingReport {
    /// `(ordering, px defect, py defect)`.
    pub orderings: Vec<(String, f64, f64)>,
}

/// Momenta rebuilt from `{-y, Lz}/2r0^2` and `{x, Lz}/2r0^2` plus a radial term
/// fixed by imposing one ordering of the radial constraint.
pub fn nonhermitian_ordering_demo(
    p: &RingParams,
    truncation: usize,
) -> Result<OrderingReport, QuantumError> {
    check_truncation(truncation, 4)?;
    let e = Exact::new(p);
    let ops = RingOperators::new(p);
    let inv_two_r2 = real((BigRational::from_integer(2.into()) * &e.r0 * &e.r0).recip());
    let inv_r2 = real((&e.r0 * &e.r0).recip());
    let tang_x = ops
        .y
        .scale(&real(-BigRational::one()))
        .anticommutator(&ops.lz)
        .scale(&inv_two_r2);
    let tang_y = ops.x.anticommutator(&ops.lz).scale(&inv_two_r2);
    let cases = [
        ("x px + y py = 0", imag(-&e.hbar * half())),
        ("px x + py y = 0", imag(&e.hbar * half())),
        ("phi3W = 0", Cq::zero()),
    ];
    let mut orderings = Vec::new();
    for (name, radial) in cases {
        let c = &radial * &inv_r2;
        let px = tang_x.add(&ops.x.scale(&c));
        let py = tang_y.add(&ops.y.scale(&c));
        let dx = OperatorMatrix::from_diffop(&px, p, truncation).hermiticity_defect();
        let dy = OperatorMatrix::from_diffop(&py, p, truncation).hermiticity_defect();
        orderings.push((name.to_string(), dx, dy));
    }
    Ok(OrderingReport { orderings })
}
