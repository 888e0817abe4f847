use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Ast, BinOp, ExprError, Monomial, Poly, Sym, SymbolTable};

/// Exact values for (some of) the symbols of a table.
pub type Point = BTreeMap<Sym, BigRational>;

/// Quotient of two polynomials kept in a canonical, comparable form.
///
/// Common factors are only partially cancelled (monomial content, integer content
/// and exact polynomial quotients), so two equal values may carry different
/// representatives. Equality is decided by cross-multiplication.
#[derive(Debug, Clone)]
pub struct RationalExpr {
    num: Poly,
    den: Poly,
}

impl RationalExpr {
    pub fn zero(nvars: usize) -> Self {
        RationalExpr {
            num: Poly::zero(nvars),
            den: Poly::one(nvars),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        RationalExpr {
            num: Poly::constant(nvars, c),
            den: Poly::one(nvars),
        }
    }

    pub fn integer(nvars: usize, n: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(n.into()))
    }

    pub fn symbol(nvars: usize, s: Sym) -> Self {
        Self::from_poly(Poly::var(nvars, s))
    }

    pub fn from_poly(p: Poly) -> Self {
        let n = p.nvars();
        RationalExpr {
            num: p,
            den: Poly::one(n),
        }
    }

    pub fn new(num: Poly, den: Poly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(normalized(num, den))
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn into_parts(self) -> (Poly, Poly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.is_polynomial() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn depends_on(&self, s: Sym) -> bool {
        self.num.depends_on(s) || self.den.depends_on(s)
    }

    pub fn symbols(&self) -> Vec<Sym> {
        let mut v = self.num.symbols();
        for s in self.den.symbols() {
            if !v.contains(&s) {
                v.push(s);
            }
        }
        v.sort();
        v
    }

    /// Total number of stored terms, a rough size measure.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    pub fn try_div(&self, rhs: &RationalExpr) -> Result<RationalExpr, ExprError> {
        if rhs.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(self * &rhs.recip_unchecked())
    }

    fn recip_unchecked(&self) -> RationalExpr {
        let mut r = RationalExpr {
            num: self.den.clone(),
            den: self.num.clone(),
        };
        if r.den.leading_is_negative() {
            r.num = -&r.num;
            r.den = -&r.den;
        }
        normalized(r.num, r.den)
    }

    pub fn recip(&self) -> Result<RationalExpr, ExprError> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(self.recip_unchecked())
    }

    pub fn scale(&self, c: &BigRational) -> RationalExpr {
        normalized(self.num.scale(c), self.den.clone())
    }

    pub fn powi(&self, k: i32) -> Result<RationalExpr, ExprError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let k = k.unsigned_abs();
        Ok(normalized(base.num.pow(k), base.den.pow(k)))
    }

    /// Partial derivative by the quotient rule.
    pub fn differentiate(&self, s: Sym) -> RationalExpr {
        let dn = self.num.derivative(s);
        if self.den.is_one() {
            return RationalExpr::from_poly(dn);
        }
        let dd = self.den.derivative(s);
        if dd.is_zero() {
            return normalized(dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        normalized(num, &self.den * &self.den)
    }

    /// Simultaneous substitution of whole symbols.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<Sym, RationalExpr>,
    ) -> Result<RationalExpr, ExprError> {
        let relevant: BTreeMap<Sym, &RationalExpr> = bindings
            .iter()
            .filter(|(s, _)| self.depends_on(**s))
            .map(|(s, e)| (*s, e))
            .collect();
        if relevant.is_empty() {
            return Ok(self.clone());
        }
        let num = substitute_poly(&self.num, &relevant);
        let den = substitute_poly(&self.den, &relevant);
        if den.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        num.try_div(&den)
    }

    /// Exact value at `point`; every symbol that occurs must be bound.
    pub fn evaluate(&self, point: &Point) -> Result<BigRational, ExprError> {
        let den = eval_poly(&self.den, point)?;
        if den.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        Ok(eval_poly(&self.num, point)? / den)
    }

    /// Floating-point value; `values` is indexed by symbol.
    pub fn evaluate_f64(&self, values: &[f64]) -> f64 {
        self.num.evaluate_f64(values) / self.den.evaluate_f64(values)
    }

    pub fn display<'a>(&'a self, symbols: &'a SymbolTable) -> Display<'a> {
        Display {
            expr: self,
            symbols,
        }
    }

    pub fn to_text(&self, symbols: &SymbolTable) -> String {
        self.display(symbols).to_string()
    }

    /// If `other = c * self` for a nonzero rational `c`, returns `c`.
    pub fn scale_factor_to(&self, other: &RationalExpr) -> Option<BigRational> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        let cross_a = &other.num * &self.den;
        let cross_b = &self.num * &other.den;
        let c = cross_a.leading_coefficient()? / cross_b.leading_coefficient()?;
        (cross_a == cross_b.scale(&c)).then_some(c)
    }
}

impl PartialEq for RationalExpr {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RationalExpr {}

fn normalized(mut num: Poly, mut den: Poly) -> RationalExpr {
    let n = num.nvars();
    debug_assert!(!den.is_zero());
    if num.is_zero() {
        return RationalExpr::zero(n);
    }
    if let Some(c) = den.as_constant() {
        return RationalExpr {
            num: num.scale(&c.recip()),
            den: Poly::one(n),
        };
    }
    let g = num.monomial_content().gcd(&den.monomial_content());
    if !g.is_one() {
        num = num.div_monomial(&g);
        den = den.div_monomial(&g);
        if let Some(c) = den.as_constant() {
            return RationalExpr {
                num: num.scale(&c.recip()),
                den: Poly::one(n),
            };
        }
    }
    if let Some(q) = num.div_exact(&den) {
        return RationalExpr::from_poly(q);
    }
    if let Some(q) = den.div_exact(&num) {
        if let Some(c) = q.as_constant() {
            return RationalExpr::constant(n, c.recip());
        }
        num = Poly::one(n);
        den = q;
    }
    let l: BigInt = num.denominator_lcm().lcm(&den.denominator_lcm());
    let g: BigInt = num.numerator_gcd().gcd(&den.numerator_gcd());
    let mut factor = BigRational::new(l, g);
    if den.leading_is_negative() {
        factor = -factor;
    }
    if !factor.is_one() {
        num = num.scale(&factor);
        den = den.scale(&factor);
    }
    RationalExpr { num, den }
}

/// Cancels an exact polynomial factor between `p` (numerator side) and `q`.
fn cancel(p: &Poly, q: &Poly) -> (Poly, Poly) {
    let n = p.nvars();
    if q.is_one() || p.is_one() {
        return (p.clone(), q.clone());
    }
    if q.len() > 1 || !q.leading_term().is_some_and(|(m, _)| m.is_one()) {
        if let Some(r) = p.div_exact(q) {
            return (r, Poly::one(n));
        }
    }
    if p.len() <= q.len() {
        if let Some(r) = q.div_exact(p) {
            return (Poly::one(n), r);
        }
    }
    (p.clone(), q.clone())
}

impl Add<&RationalExpr> for &RationalExpr {
    type Output = RationalExpr;
    fn add(self, rhs: &RationalExpr) -> RationalExpr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return normalized(&self.num + &rhs.num, self.den.clone());
        }
        if self.den.is_one() {
            return normalized(&(&self.num * &rhs.den) + &rhs.num, rhs.den.clone());
        }
        if rhs.den.is_one() {
            return normalized(&self.num + &(&rhs.num * &self.den), self.den.clone());
        }
        if let Some(q) = self.den.div_exact(&rhs.den) {
            return normalized(&self.num + &(&rhs.num * &q), self.den.clone());
        }
        if let Some(q) = rhs.den.div_exact(&self.den) {
            return normalized(&(&self.num * &q) + &rhs.num, rhs.den.clone());
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        normalized(num, &self.den * &rhs.den)
    }
}

impl Sub<&RationalExpr> for &RationalExpr {
    type Output = RationalExpr;
    fn sub(self, rhs: &RationalExpr) -> RationalExpr {
        self + &(-rhs)
    }
}

impl Mul<&RationalExpr> for &RationalExpr {
    type Output = RationalExpr;
    fn mul(self, rhs: &RationalExpr) -> RationalExpr {
        if self.is_zero() || rhs.is_zero() {
            return RationalExpr::zero(self.nvars());
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalExpr::from_poly(&self.num * &rhs.num);
        }
        let (an, bd) = cancel(&self.num, &rhs.den);
        let (bn, ad) = cancel(&rhs.num, &self.den);
        normalized(&an * &bn, &ad * &bd)
    }
}

impl Neg for &RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        RationalExpr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RationalExpr> for RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: RationalExpr) -> RationalExpr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RationalExpr> for RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: &RationalExpr) -> RationalExpr {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        -&self
    }
}

fn substitute_poly(p: &Poly, bindings: &BTreeMap<Sym, &RationalExpr>) -> RationalExpr {
    let n = p.nvars();
    let all_poly = bindings.values().all(|e| e.is_polynomial());
    if all_poly {
        let mut cache: BTreeMap<(Sym, u32), Poly> = BTreeMap::new();
        let mut out = Poly::zero(n);
        for (m, c) in p.terms() {
            let mut rest = m.exponents().to_vec();
            let mut t = Poly::constant(n, c.clone());
            for (s, e) in bindings {
                let k = m.exponent(*s);
                if k == 0 {
                    continue;
                }
                rest[s.0] = 0;
                let pw = cache.entry((*s, k)).or_insert_with(|| e.numerator().pow(k));
                t = &t * pw;
            }
            out = &out + &t.mul_term(&Monomial::from_exponents(rest), &BigRational::one());
        }
        return RationalExpr::from_poly(out);
    }
    let mut cache: BTreeMap<(Sym, u32), RationalExpr> = BTreeMap::new();
    let mut out = RationalExpr::zero(n);
    for (m, c) in p.terms() {
        let mut rest = m.exponents().to_vec();
        let mut t = RationalExpr::constant(n, c.clone());
        for (s, e) in bindings {
            let k = m.exponent(*s);
            if k == 0 {
                continue;
            }
            rest[s.0] = 0;
            let pw = cache.entry((*s, k)).or_insert_with(|| RationalExpr {
                num: e.num.pow(k),
                den: e.den.pow(k),
            });
            t = &t * &*pw;
        }
        let rest = RationalExpr::from_poly(Poly::term(
            Monomial::from_exponents(rest),
            BigRational::one(),
        ));
        out = &out + &(&t * &rest);
    }
    out
}

fn eval_poly(p: &Poly, point: &Point) -> Result<BigRational, ExprError> {
    let mut acc = BigRational::zero();
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (i, &e) in m.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let v = point
                .get(&Sym(i))
                .ok_or_else(|| ExprError::UnboundSymbol(format!("#{i}")))?;
            t *= num_traits::pow(v.clone(), e as usize);
        }
        acc += t;
    }
    Ok(acc)
}

/// Canonical rational form of a parsed expression.
pub fn canonicalize(ast: &Ast, nvars: usize) -> Result<RationalExpr, ExprError> {
    Ok(match ast {
        Ast::Int(n) => RationalExpr::constant(nvars, BigRational::from_integer(n.clone())),
        Ast::Rational(r) => RationalExpr::constant(nvars, r.clone()),
        Ast::Symbol(s) => RationalExpr::symbol(nvars, *s),
        Ast::Neg(a) => -canonicalize(a, nvars)?,
        Ast::Pow(a, k) => canonicalize(a, nvars)?.powi(*k)?,
        Ast::Binary(op, a, b) => {
            let (a, b) = (canonicalize(a, nvars)?, canonicalize(b, nvars)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a.try_div(&b)?,
            }
        }
    })
}

pub struct Display<'a> {
    expr: &'a RationalExpr,
    symbols: &'a SymbolTable,
}

fn write_poly(f: &mut fmt::Formatter<'_>, p: &Poly, symbols: &SymbolTable) -> fmt::Result {
    if p.is_zero() {
        return f.write_str("0");
    }
    for (i, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => f.write_str("-")?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        let a = c.abs();
        let mono: Vec<String> = m
            .exponents()
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(s, e)| {
                let name = symbols.name(Sym(s));
                if *e == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        if mono.is_empty() {
            write!(f, "{a}")?;
        } else if a.is_one() {
            f.write_str(&mono.join("*"))?;
        } else {
            write!(f, "{a}*{}", mono.join("*"))?;
        }
    }
    Ok(())
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expr.den.is_one() {
            return write_poly(f, &self.expr.num, self.symbols);
        }
        f.write_str("(")?;
        write_poly(f, &self.expr.num, self.symbols)?;
        f.write_str(")/(")?;
        write_poly(f, &self.expr.den, self.symbols)?;
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::expr;

    fn t() -> SymbolTable {
        SymbolTable::with_parameters(&["x", "y", "z", "r0", "lambda", "px", "py"]).unwrap()
    }

    fn e(s: &str) -> RationalExpr {
        expr(s, &t()).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn expansion_is_canonical() {
        let p = e("(x-y)*(x+y)");
        assert!(p.is_polynomial());
        assert_eq!(p.to_text(&t()), "x^2 - y^2");
    }

    #[test]
    fn cancellation_by_cross_multiplication() {
        assert_eq!(e("(x^2-y^2)/(x-y)"), e("x+y"));
        // exact quotient is detected and stored as a polynomial
        assert!(e("(x^2-y^2)/(x-y)").is_polynomial());
    }

    #[test]
    fn integer_content_reduced() {
        let v = e("2*x/4");
        assert_eq!(v.to_text(&t()), "1/2*x");
        let w = e("(2*x+4)/(6*y-2)");
        assert_eq!(w.to_text(&t()), "(x + 2)/(3*y - 1)");
        let neg = e("x/(-y-1)");
        assert_eq!(neg.to_text(&t()), "(-x)/(y + 1)");
    }

    #[test]
    fn zero_is_unique() {
        let z = e("x/y - x/y");
        assert!(z.is_zero());
        assert!(z.denominator().is_one());
    }

    #[test]
    fn division_by_zero_expression() {
        assert_eq!(expr("x/(y-y)", &t()), Err(ExprError::DivisionByZero));
        assert_eq!(expr("(x-x)^-1", &t()), Err(ExprError::DivisionByZero));
    }

    #[test]
    fn derivatives() {
        let tb = t();
        let x = tb.sym("x").unwrap();
        assert_eq!(e("x^2*y").differentiate(x), e("2*x*y"));
        assert_eq!(e("x^2+y^2-r0^2").differentiate(x), e("2*x"));
        assert_eq!(e("1/x").differentiate(x), e("-1/x^2"));
        assert_eq!(e("y/(x+y)").differentiate(x), e("-y/(x+y)^2"));
    }

    #[test]
    fn substitution_of_multiplier() {
        let tb = t();
        let lambda = tb.sym("lambda").unwrap();
        let term = e("lambda*(x^2+y^2-r0^2)");
        let bindings = BTreeMap::from([(lambda, e("(px^2+py^2)/(2*r0^2)"))]);
        let got = term.substitute(&bindings).unwrap();
        // hand expansion
        let expected = e("(px^2*x^2 + px^2*y^2 + py^2*x^2 + py^2*y^2)/(2*r0^2) - (px^2+py^2)/2");
        assert_eq!(got, expected);
    }

    #[test]
    fn substitution_is_simultaneous() {
        let tb = t();
        let (x, y) = (tb.sym("x").unwrap(), tb.sym("y").unwrap());
        let swapped = e("x - 2*y")
            .substitute(&BTreeMap::from([(x, e("y")), (y, e("x"))]))
            .unwrap();
        assert_eq!(swapped, e("y - 2*x"));
        assert_eq!(
            e("x").substitute(&BTreeMap::from([(x, e("x"))])).unwrap(),
            e("x")
        );
    }

    #[test]
    fn substitution_into_zero_denominator() {
        let tb = t();
        let x = tb.sym("x").unwrap();
        let r = e("1/x").substitute(&BTreeMap::from([(x, e("0"))]));
        assert_eq!(r, Err(ExprError::ZeroDenominator));
    }

    #[test]
    fn evaluation() {
        let tb = t();
        let s = |n| tb.sym(n).unwrap();
        let pt = Point::from([(s("x"), q(3, 1)), (s("y"), q(4, 1))]);
        assert_eq!(e("x^2+y^2").evaluate(&pt).unwrap(), q(25, 1));
        let on = Point::from([(s("x"), q(1, 1)), (s("y"), q(0, 1)), (s("r0"), q(1, 1))]);
        assert_eq!(e("x^2+y^2-r0^2").evaluate(&on).unwrap(), q(0, 1));
        assert_eq!(e("1/(x-1)").evaluate(&on), Err(ExprError::ZeroDenominator));
        assert!(matches!(
            e("z").evaluate(&on),
            Err(ExprError::UnboundSymbol(_))
        ));
    }

    #[test]
    fn text_round_trip() {
        let tb = t();
        for s in [
            "x^2 - 3/4*x*y + 1",
            "(x*y - 1)/(2*x + y)",
            "-lambda*px^2/(r0^4)",
            "0",
        ] {
            let v = e(s);
            let back = expr(&v.to_text(&tb), &tb).unwrap();
            assert_eq!(back, v, "{s}");
        }
    }

    #[test]
    fn scale_factor_detection() {
        assert_eq!(
            e("x^2+y^2-r0^2").scale_factor_to(&e("-2*x^2-2*y^2+2*r0^2")),
            Some(q(-2, 1))
        );
        assert_eq!(e("x").scale_factor_to(&e("y")), None);
        assert_eq!(e("x/(x+y)").scale_factor_to(&e("3*x/(x+y)")), Some(q(3, 1)));
    }
}
