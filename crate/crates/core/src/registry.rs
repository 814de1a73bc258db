//! Catalog of q-series identities with their parameter bindings.
//!
//! Every entry builds an [`Identity`] from a [`Binding`]. Parameterized
//! families are checked at a fixed list of rational or monomial bindings;
//! bindings outside an entry's domain are rejected before evaluation.

use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eta::EtaQuotientSpec;
use crate::identity::{index, Expr, HypergeomSumSpec, Identity, VerifyReport};
use crate::nahm::{Matrix, NahmTriple};
use crate::rational::{fmt_rational, int, parse_rational, rat, Rational};
use crate::series::Monomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Rat(Rational),
    Mono(Monomial),
}

impl Value {
    pub fn parse(s: &str) -> Result<Value> {
        if s.contains('q') {
            Ok(Value::Mono(s.parse()?))
        } else {
            Ok(Value::Rat(parse_rational(s)?))
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rat(r) => write!(f, "{}", fmt_rational(r)),
            Value::Mono(m) => write!(f, "{}", compact(m)),
        }
    }
}

/// `q^2`, `-q^(1/2)`, `3*q`, `1/2`.
fn compact(m: &Monomial) -> String {
    if m.exp.is_zero() {
        return fmt_rational(&m.coeff);
    }
    let power = if m.exp.is_one() {
        "q".to_string()
    } else if m.exp.is_integer() {
        format!("q^{}", m.exp)
    } else {
        format!("q^({})", fmt_rational(&m.exp))
    };
    if m.coeff.is_one() {
        power
    } else if m.coeff == -Rational::one() {
        format!("-{power}")
    } else {
        format!("{}*{power}", fmt_rational(&m.coeff))
    }
}

/// Named parameter values, in the order the entry lists them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Binding(pub Vec<(String, Value)>);

impl Binding {
    pub fn get(&self, name: &str) -> Result<&Value> {
        self.0
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::UnboundParameter(name.to_string()))
    }

    pub fn rat(&self, name: &str) -> Result<Rational> {
        match self.get(name)? {
            Value::Rat(r) => Ok(r.clone()),
            Value::Mono(m) if m.exp.is_zero() => Ok(m.coeff.clone()),
            Value::Mono(m) => Err(Error::InvalidBinding(format!("{name} = {m} must be a rational"))),
        }
    }

    pub fn mono(&self, name: &str) -> Result<Monomial> {
        match self.get(name)? {
            Value::Rat(r) => Ok(Monomial::constant(r.clone())),
            Value::Mono(m) => Ok(m.clone()),
        }
    }

    /// Parses `a=3/2,z=q^(1/2)`.
    pub fn parse(s: &str) -> Result<Binding> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("binding '{part}' is not name=value")))?;
            out.push((k.trim().to_string(), Value::parse(v.trim())?));
        }
        Ok(Binding(out))
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return Ok(());
        }
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

type Builder = Box<dyn Fn(&Binding) -> Result<Identity> + Send + Sync>;
type Check = fn(&Binding) -> Result<()>;

pub struct IdentityEntry {
    pub name: &'static str,
    pub anchor: &'static str,
    pub params: &'static [&'static str],
    pub bindings: Vec<Binding>,
    pub default_order: i64,
    build: Builder,
    check: Check,
}

impl fmt::Debug for IdentityEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdentityEntry").field("name", &self.name).field("bindings", &self.bindings.len()).finish()
    }
}

impl IdentityEntry {
    /// Builds the identity after checking names and the entry's constraints.
    pub fn identity(&self, b: &Binding) -> Result<Identity> {
        for p in self.params {
            b.get(p)?;
        }
        if let Some((k, _)) = b.0.iter().find(|(k, _)| !self.params.contains(&k.as_str())) {
            return Err(Error::InvalidBinding(format!("{} has no parameter '{k}'", self.name)));
        }
        (self.check)(b)?;
        (self.build)(b)
    }

    pub fn key(&self, b: &Binding) -> String {
        format!("{}{b}", self.name)
    }

    pub fn verify_binding(&self, b: &Binding, order: Option<&Rational>) -> VerifyReport {
        let order = order.cloned().unwrap_or_else(|| int(self.default_order));
        match self.identity(b) {
            Ok(id) => id.verify(&self.key(b), &order),
            Err(e) => VerifyReport {
                key: self.key(b),
                order,
                outcome: crate::identity::Outcome::Failed(e.to_string()),
            },
        }
    }

    /// Every stored binding (or the empty binding for a fixed identity).
    pub fn verify(&self, order: Option<&Rational>) -> Vec<VerifyReport> {
        self.all_bindings().iter().map(|b| self.verify_binding(b, order)).collect()
    }

    pub fn all_bindings(&self) -> Vec<Binding> {
        if self.bindings.is_empty() {
            vec![Binding::default()]
        } else {
            self.bindings.clone()
        }
    }
}

pub fn registry() -> &'static [IdentityEntry] {
    static REG: OnceLock<Vec<IdentityEntry>> = OnceLock::new();
    REG.get_or_init(catalog)
}

pub fn lookup(name: &str) -> Result<&'static IdentityEntry> {
    registry().iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownIdentity(name.to_string()))
}

/// Every entry at every binding, in parallel; reports sorted by key.
pub fn verify_all(order: Option<&Rational>) -> Vec<VerifyReport> {
    let jobs: Vec<(&IdentityEntry, Binding)> =
        registry().iter().flat_map(|e| e.all_bindings().into_iter().map(move |b| (e, b))).collect();
    let mut out: Vec<VerifyReport> = jobs.par_iter().map(|(e, b)| e.verify_binding(b, order)).collect();
    out.sort_by(|a, b| a.key.cmp(&b.key));
    out
}

fn r(n: i64, d: i64) -> Rational {
    rat(n, d)
}

fn i(n: i64) -> Rational {
    int(n)
}

fn q(e: Rational) -> Monomial {
    Monomial::q(e)
}

fn qi(e: i64) -> Monomial {
    Monomial::q(int(e))
}

fn mono(c: Rational, e: Rational) -> Monomial {
    Monomial::new(c, e)
}

fn neg(m: Monomial) -> Monomial {
    m.neg()
}

fn e() -> EtaQuotientSpec {
    EtaQuotientSpec::new()
}

fn eta(s: EtaQuotientSpec) -> Expr {
    Expr::eta(s)
}

fn sum(terms: Vec<Expr>) -> Expr {
    Expr::add(terms)
}

fn single(quad: Rational, lin: Rational) -> HypergeomSumSpec {
    HypergeomSumSpec::new(quad, lin)
}

fn bind(pairs: &[(&str, Value)]) -> Binding {
    Binding(pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
}

fn rv(n: i64, d: i64) -> Value {
    Value::Rat(rat(n, d))
}

fn mv(c: Rational, e: Rational) -> Value {
    Value::Mono(Monomial::new(c, e))
}

fn qv(e: Rational) -> Value {
    Value::Mono(Monomial::q(e))
}

fn nahm(a: Matrix, b: Vec<Rational>, sub: i64) -> Result<Expr> {
    Ok(Expr::nahm(&NahmTriple::new(a, b, Rational::zero())?, int(sub)))
}

/// Nahm sum with denominators `(q^s;q^s)` whose exponent is
/// `Σ diag_i n_i² + Σ cross_ij n_i n_j + Σ lin_i n_i`.
fn form(sub: i64, diag: &[Rational], cross: &[(usize, usize, Rational)], lin: &[Rational]) -> Result<Expr> {
    let n = diag.len();
    let s = int(sub);
    let mut a = vec![vec![Rational::zero(); n]; n];
    for (k, d) in diag.iter().enumerate() {
        a[k][k] = d * int(2) / &s;
    }
    for (x, y, c) in cross {
        a[*x][*y] = c / &s;
        a[*y][*x] = c / &s;
    }
    nahm(a, lin.iter().map(|l| l / &s).collect(), sub)
}

/// `(1/(q^s;q^s)_∞) Σ_{n∈ℤ} q^(quad n² + lin n)`.
fn theta_over_qq(quad: Rational, lin: Rational) -> Expr {
    Expr::mul(vec![Expr::product(&[(qi(1), i(1), -1)]), Expr::theta_sum(quad, lin)])
}

fn no_check(_: &Binding) -> Result<()> {
    Ok(())
}

fn positive_exp(b: &Binding, name: &str, m: &Monomial) -> Result<()> {
    if m.exp.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidBinding(format!("{name} needs a positive q-exponent, got {m} ({b})")))
    }
}

fn entry(
    name: &'static str,
    anchor: &'static str,
    order: i64,
    build: impl Fn(&Binding) -> Result<Identity> + Send + Sync + 'static,
) -> IdentityEntry {
    IdentityEntry {
        name,
        anchor,
        params: &[],
        bindings: Vec::new(),
        default_order: order,
        build: Box::new(build),
        check: no_check,
    }
}

fn family(
    name: &'static str,
    anchor: &'static str,
    params: &'static [&'static str],
    bindings: Vec<Binding>,
    order: i64,
    build: impl Fn(&Binding) -> Result<Identity> + Send + Sync + 'static,
    check: Check,
) -> IdentityEntry {
    IdentityEntry { name, anchor, params, bindings, default_order: order, build: Box::new(build), check }
}

const ORDER: i64 = 120;

fn catalog() -> Vec<IdentityEntry> {
    let mut v = Vec::new();
    classical(&mut v);
    slater(&mut v);
    rank_two(&mut v);
    rank_three(&mut v);
    four_thirds(&mut v);
    lifted(&mut v);
    auxiliary(&mut v);
    v
}

fn classical(v: &mut Vec<IdentityEntry>) {
    v.push(entry("rr-1", "Rogers-Ramanujan, first identity", ORDER, |_| {
        Ok(Identity::new(nahm(vec![vec![i(2)]], vec![i(0)], 1)?, eta(e().j(5, 1).jam(1, 5, -1))))
    }));
    v.push(entry("rr-2", "Rogers-Ramanujan, second identity", ORDER, |_| {
        Ok(Identity::new(nahm(vec![vec![i(2)]], vec![i(1)], 1)?, eta(e().j(5, 1).jam(2, 5, -1))))
    }));
    v.push(family(
        "q-binomial",
        "q-binomial theorem",
        &["a", "z"],
        vec![
            bind(&[("a", qv(i(2))), ("z", qv(i(1)))]),
            bind(&[("a", mv(i(-1), r(1, 2))), ("z", qv(r(1, 2)))]),
            bind(&[("a", mv(i(3), i(0))), ("z", qv(i(2)))]),
        ],
        ORDER,
        |b| {
            let (a, z) = (b.mono("a")?, b.mono("z")?);
            let lhs = single(i(0), i(0)).arg(z.clone()).poch(a.clone(), i(1), 1, 0, 1).poch(qi(1), i(1), 1, 0, -1);
            Ok(Identity::new(Expr::sum(lhs), Expr::product(&[(a.mul(&z), i(1), 1), (z, i(1), -1)])))
        },
        |b| positive_exp(b, "z", &b.mono("z")?),
    ));
    v.push(family(
        "euler-1",
        "Euler's first q-exponential identity",
        &["z"],
        vec![
            bind(&[("z", qv(i(1)))]),
            bind(&[("z", mv(i(-1), r(1, 2)))]),
            bind(&[("z", mv(i(2), i(3)))]),
        ],
        ORDER,
        |b| {
            let z = b.mono("z")?;
            let lhs = single(i(0), i(0)).arg(z.clone()).poch(qi(1), i(1), 1, 0, -1);
            Ok(Identity::new(Expr::sum(lhs), Expr::product(&[(z, i(1), -1)])))
        },
        |b| positive_exp(b, "z", &b.mono("z")?),
    ));
    v.push(family(
        "euler-2",
        "Euler's second q-exponential identity",
        &["z"],
        vec![
            bind(&[("z", qv(i(1)))]),
            bind(&[("z", mv(i(1), i(0)))]),
            bind(&[("z", qv(i(-1)))]),
            bind(&[("z", mv(i(2), r(1, 2)))]),
        ],
        ORDER,
        |b| {
            let z = b.mono("z")?;
            let lhs = single(r(1, 2), r(-1, 2)).arg(z.clone()).poch(qi(1), i(1), 1, 0, -1);
            Ok(Identity::new(Expr::sum(lhs), Expr::product(&[(neg(z), i(1), 1)])))
        },
        no_check,
    ));
    v.push(family(
        "q-gauss",
        "q-Gauss summation",
        &["a", "b", "c"],
        vec![
            bind(&[("a", qv(i(1))), ("b", qv(i(2))), ("c", qv(i(4)))]),
            bind(&[("a", mv(i(-1), r(1, 2))), ("b", qv(i(1))), ("c", qv(i(3)))]),
            bind(&[("a", mv(i(2), i(0))), ("b", mv(i(-1), i(1))), ("c", qv(i(2)))]),
        ],
        ORDER,
        |b| {
            let (a, bb, c) = (b.mono("a")?, b.mono("b")?, b.mono("c")?);
            let z = c.div(&a).div(&bb);
            let lhs = HypergeomSumSpec::phi(&[a.clone(), bb.clone()], std::slice::from_ref(&c), z.clone());
            let rhs = Expr::product(&[(c.div(&a), i(1), 1), (c.div(&bb), i(1), 1), (c, i(1), -1), (z, i(1), -1)]);
            Ok(Identity::new(Expr::sum(lhs), rhs))
        },
        |b| positive_exp(b, "c/ab", &b.mono("c")?.div(&b.mono("a")?).div(&b.mono("b")?)),
    ));
    v.push(family(
        "phi11",
        "sum of a 1phi1 series",
        &["a", "c"],
        vec![
            bind(&[("a", qv(i(1))), ("c", qv(i(3)))]),
            bind(&[("a", mv(i(-1), i(0))), ("c", qv(i(1)))]),
            bind(&[("a", mv(i(2), i(1))), ("c", qv(r(5, 2)))]),
        ],
        ORDER,
        |b| {
            let (a, c) = (b.mono("a")?, b.mono("c")?);
            let lhs = HypergeomSumSpec::phi(std::slice::from_ref(&a), std::slice::from_ref(&c), c.div(&a));
            Ok(Identity::new(Expr::sum(lhs), Expr::product(&[(c.div(&a), i(1), 1), (c, i(1), -1)])))
        },
        |b| positive_exp(b, "c", &b.mono("c")?),
    ));
    v.push(family(
        "bailey-2phi2",
        "q-analogue of Bailey's 2F1(-1) sum",
        &["a", "b"],
        vec![
            bind(&[("a", qv(i(1))), ("b", qv(i(1)))]),
            bind(&[("a", mv(i(-1), i(0))), ("b", qv(i(2)))]),
            bind(&[("a", qv(i(2))), ("b", qv(i(3)))]),
        ],
        ORDER,
        |b| {
            let (a, bb) = (b.mono("a")?, b.mono("b")?);
            let lhs = HypergeomSumSpec::phi(
                &[a.clone(), qi(1).div(&a)],
                &[neg(qi(1)), bb.clone()],
                neg(bb.clone()),
            );
            let rhs = Expr::product(&[(a.mul(&bb), i(2), 1), (bb.mul(&qi(1)).div(&a), i(2), 1), (bb, i(1), -1)]);
            Ok(Identity::new(Expr::sum(lhs), rhs))
        },
        |b| positive_exp(b, "b", &b.mono("b")?),
    ));
    v.push(family(
        "gauss-2phi2",
        "q-analogue of Gauss' 2F1(-1) sum",
        &["a", "b"],
        vec![
            bind(&[("a", qv(r(1, 2))), ("b", qv(i(1)))]),
            bind(&[("a", qv(i(1))), ("b", mv(i(-1), r(1, 2)))]),
            bind(&[("a", mv(i(2), i(1))), ("b", qv(r(1, 4)))]),
        ],
        ORDER,
        |b| {
            let (a, bb) = (b.mono("a")?, b.mono("b")?);
            let (a2, b2) = (a.pow(2), bb.pow(2));
            let ab = a.mul(&bb).times_q(&r(1, 2));
            let lhs = HypergeomSumSpec::phi(&[a2.clone(), b2.clone()], &[ab.clone(), neg(ab)], neg(qi(1)));
            let rhs = Expr::product(&[
                (a2.mul(&qi(1)), i(2), 1),
                (b2.mul(&qi(1)), i(2), 1),
                (qi(1), i(2), -1),
                (a2.mul(&b2).mul(&qi(1)), i(2), -1),
            ]);
            Ok(Identity::new(Expr::sum(lhs), rhs))
        },
        |b| positive_exp(b, "a²b²q", &b.mono("a")?.mul(&b.mono("b")?).pow(2).mul(&qi(1))),
    ));
}

/// `(a; q^base)_{mult·n+shift}` in the denominator.
fn den(s: HypergeomSumSpec, a: Monomial, base: i64, mult: u32, shift: u32) -> HypergeomSumSpec {
    s.poch(a, i(base), mult, shift, -1)
}

fn num(s: HypergeomSumSpec, a: Monomial, base: i64, mult: u32, shift: u32) -> HypergeomSumSpec {
    s.poch(a, i(base), mult, shift, 1)
}

fn minus_one() -> Monomial {
    Monomial::constant(-Rational::one())
}

fn slater(v: &mut Vec<IdentityEntry>) {
    let fixed: Vec<(&'static str, &'static str, fn() -> (HypergeomSumSpec, EtaQuotientSpec))> = vec![
        ("s25", "Slater's list, modulus 6", || {
            let s = den(num(single(i(1), i(0)), neg(qi(1)), 2, 1, 0), qi(4), 4, 1, 0);
            (s, e().j(2, 1).jam(3, 6, 1).j(1, -1).j(4, -1))
        }),
        ("s80", "Slater's list, modulus 14, first", || {
            let s = den(den(single(r(1, 2), r(1, 2)), qi(1), 1, 1, 0), qi(1), 2, 1, 1);
            (s, e().j(2, 1).j(14, 3).j(1, -1).jam(1, 14, -1).jam(4, 14, -1).jam(6, 14, -1))
        }),
        ("s81", "Slater's list, modulus 14, second", || {
            let s = den(den(single(r(1, 2), r(1, 2)), qi(1), 1, 1, 0), qi(1), 2, 1, 0);
            (s, e().j(2, 1).j(14, 3).j(1, -1).jam(2, 14, -1).jam(3, 14, -1).jam(4, 14, -1))
        }),
        ("s82", "Slater's list, modulus 14, third", || {
            let s = den(den(single(r(1, 2), r(3, 2)), qi(1), 1, 1, 0), qi(1), 2, 1, 1);
            (s, e().j(2, 1).j(14, 3).j(1, -1).jam(2, 14, -1).jam(5, 14, -1).jam(6, 14, -1))
        }),
        ("s117", "Slater's list, modulus 28, first", || {
            let s = den(den(single(i(1), i(0)), qi(1), 2, 1, 0), qi(4), 4, 1, 0);
            (s, e().j(2, 1).j(14, 1).jam(3, 28, 1).jam(11, 28, 1).j(1, -1).j(28, -1).jam(4, 28, -1).jam(12, 28, -1))
        }),
        ("s118", "Slater's list, modulus 28, second", || {
            let s = den(den(single(i(1), i(2)), qi(1), 2, 1, 0), qi(4), 4, 1, 0);
            (s, e().j(2, 1).jam(1, 14, 1).jam(12, 28, 1).j(1, -1).j(4, -1).j(28, -1))
        }),
        ("s119", "Slater's list, modulus 28, third", || {
            let s = den(den(single(i(1), i(2)), qi(1), 1, 2, 1), neg(qi(2)), 2, 1, 0);
            (s, e().j(2, 1).jam(5, 14, 1).jam(4, 28, 1).j(1, -1).j(4, -1).j(28, -1))
        }),
        ("ab-3.5.4", "Lost Notebook, alternating modulus 14, first", || {
            let s = den(den(single(i(1), i(0)).arg(minus_one()), qi(4), 4, 1, 0), neg(qi(1)), 2, 1, 0);
            (s, e().jam(1, 14, 1).jam(5, 14, 1).j(7, 1).jam(2, 14, -1).jam(4, 14, -1).j(14, -1))
        }),
        ("ab-3.5.5", "Lost Notebook, alternating modulus 14, second", || {
            let s = den(den(single(i(1), i(2)).arg(minus_one()), qi(4), 4, 1, 0), neg(qi(1)), 2, 1, 0);
            (s, e().jam(3, 14, 1).jam(5, 14, 1).j(7, 1).jam(4, 14, -1).jam(6, 14, -1).j(14, -1))
        }),
        ("ab-3.5.6", "Lost Notebook, alternating modulus 14, third", || {
            let s = den(den(single(i(1), i(2)).arg(minus_one()), qi(4), 4, 1, 0), neg(qi(1)), 2, 1, 1);
            (s, e().jam(1, 14, 1).jam(3, 14, 1).j(7, 1).jam(2, 14, -1).jam(6, 14, -1).j(14, -1))
        }),
        ("ab-4.2.8", "Lost Notebook, modulus 6 pair, first sum", || {
            let s = den(den(num(single(i(1), i(0)), minus_one(), 1, 1, 0), qi(1), 1, 1, 0), qi(1), 2, 1, 0);
            (s, e().j(2, 1).j(3, 2).j(1, -2).j(6, -1))
        }),
        ("ab-4.2.9", "Lost Notebook, modulus 6 pair, second sum", || {
            let s = den(den(num(single(i(1), i(0)), neg(qi(1)), 1, 1, 0), qi(1), 1, 1, 0), qi(1), 2, 1, 1);
            (s, e().j(2, 1).j(3, 2).j(1, -2).j(6, -1))
        }),
        ("ab-4.2.11", "Lost Notebook, modulus 12", || {
            let s = den(num(single(i(1), i(2)).arg(minus_one()), qi(1), 2, 1, 0), qi(4), 4, 1, 0);
            (s, e().j(1, 1).j(6, 2).jam(2, 12, 1).j(2, -2).jam(1, 6, -1).j(12, -1))
        }),
    ];
    for (name, anchor, f) in fixed {
        v.push(entry(name, anchor, ORDER, move |_| {
            let (s, spec) = f();
            Ok(Identity::new(Expr::sum(s), eta(spec)))
        }));
    }
    v.push(family(
        "ab-5.3.1",
        "Lost Notebook, modulus 6 with a free parameter",
        &["a"],
        vec![bind(&[("a", mv(i(1), i(0)))]), bind(&[("a", qv(i(1)))]), bind(&[("a", mv(i(-1), r(1, 2)))])],
        ORDER,
        |b| {
            let a = b.mono("a")?;
            let s = single(i(2), i(0)).poch(neg(a.mul(&qi(1))), i(2), 1, 0, 1).poch(neg(qi(1).div(&a)), i(2), 1, 0, 1);
            let s = den(s, qi(2), 2, 2, 0);
            let rhs = Expr::product(&[
                (neg(a.mul(&qi(3))), i(6), 1),
                (neg(qi(3).div(&a)), i(6), 1),
                (qi(6), i(6), 1),
                (qi(2), i(2), -1),
            ]);
            Ok(Identity::new(Expr::sum(s), rhs))
        },
        |b| {
            let a = b.mono("a")?;
            if a.is_zero() {
                return Err(Error::InvalidBinding("a must be nonzero".into()));
            }
            Ok(())
        },
    ));
    v.push(family(
        "ab-5.2.4",
        "Lost Notebook, two-parameter transformation",
        &["x", "rho1", "rho2"],
        vec![
            bind(&[("x", mv(i(1), i(0))), ("rho1", qv(r(1, 2))), ("rho2", mv(i(-1), r(1, 2)))]),
            bind(&[("x", qv(i(1))), ("rho1", mv(i(-1), i(0))), ("rho2", qv(i(1)))]),
            bind(&[("x", qv(r(1, 2))), ("rho1", qv(r(1, 3))), ("rho2", qv(r(1, 2)))]),
        ],
        ORDER,
        |b| {
            let (x, p1, p2) = (b.mono("x")?, b.mono("rho1")?, b.mono("rho2")?);
            let w = qi(2).div(&p1).div(&p2);
            let lhs = single(i(0), i(0))
                .arg(w.clone())
                .poch(neg(x.clone()), i(1), 1, 1, 1)
                .poch(neg(qi(1).div(&x)), i(1), 1, 0, 1)
                .poch(p1.clone(), i(1), 1, 0, 1)
                .poch(p2.clone(), i(1), 1, 0, 1)
                .poch(qi(1), i(1), 2, 1, -1);
            let inner = |y: Monomial| {
                Expr::sum(
                    single(r(1, 2), r(1, 2))
                        .arg(y)
                        .poch(p1.clone(), i(1), 1, 0, 1)
                        .poch(p2.clone(), i(1), 1, 0, 1)
                        .poch(qi(2).div(&p1), i(1), 1, 0, -1)
                        .poch(qi(2).div(&p2), i(1), 1, 0, -1),
                )
            };
            let rhs = Expr::mul(vec![
                Expr::product(&[
                    (qi(2).div(&p1), i(1), 1),
                    (qi(2).div(&p2), i(1), 1),
                    (qi(1), i(1), -1),
                    (w.clone(), i(1), -1),
                ]),
                sum(vec![inner(w.mul(&x)).scale(x.clone()), inner(w.div(&x))]),
            ]);
            Ok(Identity::new(Expr::sum(lhs), rhs))
        },
        |b| {
            let w = qi(2).div(&b.mono("rho1")?).div(&b.mono("rho2")?);
            positive_exp(b, "q²/ρ₁ρ₂", &w)?;
            if b.mono("x")?.is_zero() {
                return Err(Error::InvalidBinding("x must be nonzero".into()));
            }
            Ok(())
        },
    ));
    v.push(family(
        "ab-5.2.4-inf",
        "Lost Notebook transformation with both parameters sent to infinity",
        &["x"],
        vec![bind(&[("x", mv(i(1), i(0)))]), bind(&[("x", qv(i(1)))]), bind(&[("x", qv(r(1, 2)))])],
        ORDER,
        |b| {
            let x = b.mono("x")?;
            let lhs = single(i(1), i(1))
                .poch(neg(x.clone()), i(1), 1, 1, 1)
                .poch(neg(qi(1).div(&x)), i(1), 1, 0, 1)
                .poch(qi(1), i(1), 2, 1, -1);
            let inner = |y: Monomial| Expr::sum(single(r(3, 2), r(3, 2)).arg(y));
            let rhs = Expr::mul(vec![
                Expr::product(&[(qi(1), i(1), -1)]),
                sum(vec![inner(x.clone()).scale(x.clone()), inner(x.inv())]),
            ]);
            Ok(Identity::new(Expr::sum(lhs), rhs))
        },
        |b| {
            if b.mono("x")?.is_zero() {
                return Err(Error::InvalidBinding("x must be nonzero".into()));
            }
            Ok(())
        },
    ));
}


fn vz_check(b: &Binding) -> Result<()> {
    let a = b.rat("a")?;
    if a <= r(1, 2) || a == i(1) {
        return Err(Error::InvalidBinding(format!("a = {} needs a > 1/2 and a != 1", fmt_rational(&a))));
    }
    Ok(())
}

fn vz_matrix(a: &Rational) -> Matrix {
    let off = i(1) - a;
    vec![vec![a.clone(), off.clone()], vec![off, a.clone()]]
}

fn rank_two(v: &mut Vec<IdentityEntry>) {
    let mut grid = Vec::new();
    for a in [rv(3, 2), rv(2, 1), rv(3, 1)] {
        for bb in [rv(0, 1), rv(1, 2), rv(1, 1)] {
            grid.push(bind(&[("a", a.clone()), ("b", bb)]));
        }
    }
    let a_only = || vec![bind(&[("a", rv(3, 2))]), bind(&[("a", rv(2, 1))]), bind(&[("a", rv(3, 1))])];
    v.push(family(
        "vz-rank2-1",
        "rank-two family with A = [[a, 1-a], [1-a, a]], B = (b, -b)",
        &["a", "b"],
        grid,
        ORDER,
        |b| {
            let (a, bb) = (b.rat("a")?, b.rat("b")?);
            let lhs = nahm(vz_matrix(&a), vec![bb.clone(), -bb.clone()], 1)?;
            Ok(Identity::new(lhs, theta_over_qq(a / i(2), bb)))
        },
        vz_check,
    ));
    v.push(family(
        "vz-rank2-2",
        "rank-two family with A = [[a, 1-a], [1-a, a]], B = (-1/2, -1/2)",
        &["a"],
        a_only(),
        ORDER,
        |b| {
            let a = b.rat("a")?;
            let lhs = nahm(vz_matrix(&a), vec![r(-1, 2), r(-1, 2)], 1)?;
            Ok(Identity::new(lhs, theta_over_qq(a / i(2), r(1, 2)).scale(Monomial::constant(i(2)))))
        },
        vz_check,
    ));
    // The displayed exponent of the j-term is garbled; B = (1 - a/2, a/2) is used.
    v.push(family(
        "vz-rank2-3",
        "rank-two family with A = [[a, 1-a], [1-a, a]], B = (1 - a/2, a/2)",
        &["a"],
        a_only(),
        ORDER,
        |b| {
            let a = b.rat("a")?;
            let half = &a / i(2);
            let lhs = nahm(vz_matrix(&a), vec![i(1) - &half, half.clone()], 1)?;
            Ok(Identity::new(lhs, theta_over_qq(half.clone(), half).scale(Monomial::constant(r(1, 2)))))
        },
        vz_check,
    ));
}

fn thm1_lhs(m: &Rational, lin: &[Rational]) -> Result<Expr> {
    let d = m * i(2) + i(1);
    form(4, &[d.clone(), d, i(2)], &[(0, 1, i(2) - m * i(4)), (0, 2, i(-2)), (1, 2, i(-2))], lin)
}

fn thm1_check(b: &Binding) -> Result<()> {
    let m = b.rat("m")?;
    if !m.is_positive() {
        return Err(Error::InvalidBinding("m must be positive".into()));
    }
    index(&(&m * i(8)))?;
    Ok(())
}

fn quarter_grid() -> Vec<Binding> {
    vec![bind(&[("m", rv(1, 2))]), bind(&[("m", rv(1, 1))]), bind(&[("m", rv(3, 4))])]
}

fn rank_three(v: &mut Vec<IdentityEntry>) {
    v.push(family(
        "thm1-1",
        "dual of the lifted rank-two family, B proportional to (1, -1, 0)",
        &["m", "nu"],
        vec![
            bind(&[("m", rv(1, 2)), ("nu", rv(0, 1))]),
            bind(&[("m", rv(1, 2)), ("nu", rv(1, 1))]),
            bind(&[("m", rv(1, 1)), ("nu", rv(0, 1))]),
            bind(&[("m", rv(3, 4)), ("nu", rv(1, 2))]),
        ],
        160,
        |b| {
            let (m, nu) = (b.rat("m")?, b.rat("nu")?);
            let lhs = thm1_lhs(&m, &[nu.clone(), -nu.clone(), i(0)])?;
            let modulus = index(&(i(4) * (&m * i(4) + i(1))))?;
            let first = index(&(i(2) * (&m * i(4) + &nu + i(1))))?;
            let second = index(&(&nu * i(-2)))?;
            let rhs = sum(vec![
                eta(e().j(4, 3).jbar(first, modulus, 1).j(2, -2).j(8, -2)),
                eta(e().j(8, 2).jbar(second, modulus, 1).j(4, -3).times(&mono(i(2), &m * i(2) + &nu + i(1)))),
            ]);
            Ok(Identity::new(lhs, rhs))
        },
        |b| {
            thm1_check(b)?;
            let (m, nu) = (b.rat("m")?, b.rat("nu")?);
            index(&(&m * i(8) + &nu * i(2)))?;
            Ok(())
        },
    ));
    v.push(family(
        "thm1-2",
        "dual of the lifted rank-two family, B proportional to (0, 0, 1)",
        &["m"],
        quarter_grid(),
        160,
        |b| {
            let m = b.rat("m")?;
            let lhs = thm1_lhs(&m, &[i(0), i(0), i(-2)])?;
            let modulus = index(&(&m * i(16) + i(4)))?;
            let rhs = sum(vec![
                eta(e().j(8, 2).jbar(index(&(&m * i(8)))?, modulus, 1).j(4, -3).with_coeff(4)),
                eta(e().j(4, 3).jbar(2, modulus, 1).j(2, -2).j(8, -2).times(&mono(i(2), &m * i(2) - i(1)))),
            ]);
            Ok(Identity::new(lhs, rhs))
        },
        thm1_check,
    ));
    v.push(family(
        "thm1-3",
        "dual of the lifted rank-two family, B proportional to (1, -1, 2)",
        &["m"],
        quarter_grid(),
        160,
        |b| {
            let m = b.rat("m")?;
            let lhs = thm1_lhs(&m, &[i(1), i(-1), i(2)])?;
            let modulus = index(&(&m * i(16) + i(4)))?;
            let rhs = sum(vec![
                eta(e().j(8, 2).jbar(index(&(&m * i(8) + i(2)))?, modulus, 1).j(4, -3)),
                eta(e()
                    .j(4, 3)
                    .j(index(&(&m * i(32) + i(8)))?, 2)
                    .j(2, -2)
                    .j(8, -2)
                    .j(modulus, -1)
                    .with_q(&m * i(2))),
            ]);
            Ok(Identity::new(lhs, rhs))
        },
        thm1_check,
    ));

    let thm3_lhs = |lin: [i64; 3]| {
        form(2, &[i(2), i(2), i(2)], &[(0, 1, i(-2)), (0, 2, i(-2))], &lin.map(i))
    };
    let p28 = |c: i64, den: [i64; 3]| {
        e().j(4, 6).j(28, 3).j(2, -6).jam(den[0], 28, -1).jam(den[1], 28, -1).jam(den[2], 28, -1).with_coeff(c)
    };
    let p14 = |c: Monomial, up: [i64; 2], down: [i64; 2]| {
        e().j(1, 5).j(7, 1).jam(up[0], 14, 1).jam(up[1], 14, 1).j(2, -5).jam(down[0], 14, -1).jam(down[1], 14, -1).j(14, -1).times(&c)
    };
    v.push(entry("thm3-1", "rank-three sum over (q²;q²) with linear part (-2, 2, 0)", ORDER, move |_| {
        let rhs = sum(vec![
            eta(p28(4, [4, 6, 8])),
            eta(p14(mono(r(-1, 2), i(0)), [1, 3], [2, 6])),
            eta(e().j(2, 11).jam(5, 14, 1).jam(4, 28, 1).j(1, -6).j(4, -6).j(28, -1).times(&mono(r(-1, 2), i(0)))),
        ]);
        Ok(Identity::new(thm3_lhs([-2, 2, 0])?, rhs))
    }));
    v.push(entry("thm3-2", "rank-three sum over (q²;q²) with zero linear part", ORDER, move |_| {
        let rhs = sum(vec![
            eta(e().j(2, 11).jam(1, 14, 1).jam(12, 28, 1).j(1, -6).j(4, -6).j(28, -1).times(&mono(r(1, 2), i(0)))),
            eta(p14(mono(r(1, 2), i(0)), [3, 5], [4, 6])),
            eta(p28(-4, [4, 10, 12]).with_q(i(2))),
        ]);
        Ok(Identity::new(thm3_lhs([0, 0, 0])?, rhs))
    }));
    v.push(entry("thm3-3", "rank-three sum over (q²;q²) with linear part (-2, 2, 2)", ORDER, move |_| {
        let rhs = sum(vec![
            eta(e()
                .j(2, 11)
                .j(14, 1)
                .jam(3, 28, 1)
                .jam(11, 28, 1)
                .j(1, -6)
                .j(4, -5)
                .j(28, -1)
                .jam(4, 28, -1)
                .jam(12, 28, -1)
                .times(&mono(r(1, 2), i(-1)))),
            eta(p14(mono(r(-1, 2), i(-1)), [1, 5], [2, 4])),
            eta(p28(-4, [2, 8, 12])),
        ]);
        Ok(Identity::new(thm3_lhs([-2, 2, 2])?, rhs))
    }));

    let lift11 = |lin: [i64; 3]| {
        form(4, &[i(3), i(3), i(3)], &[(0, 1, i(-2)), (0, 2, i(-2)), (1, 2, i(-2))], &lin.map(i))
    };
    let big = |a: i64, c: Monomial| e().j(6, 5).jam(a, 60, 1).j(3, -2).j(4, -2).j(12, -2).times(&c);
    let small = |a: i64, c: Monomial| e().j(2, 2).j(3, 1).j(12, 1).jam(a, 60, 1).j(1, -1).j(4, -3).j(6, -1).times(&c);
    v.push(entry("thm-lift-11-1", "rank-three lift of the (1, -1/2; -1/2, 1) sum, zero linear part", 200, move |_| {
        let rhs = sum(vec![
            eta(big(28, Monomial::one())),
            eta(small(12, mono(i(2), i(3)))),
            eta(big(8, mono(i(-1), i(4)))),
        ]);
        Ok(Identity::new(lift11([0, 0, 0])?, rhs))
    }));
    v.push(entry("thm-lift-11-2", "rank-three lift of the (1, -1/2; -1/2, 1) sum, linear part (-2, 2, -2)", 200, move |_| {
        let rhs = sum(vec![
            eta(small(24, mono(i(2), i(0)))),
            eta(big(16, qi(1))),
            eta(big(4, qi(5))),
        ]);
        Ok(Identity::new(lift11([-2, 2, -2])?, rhs))
    }));
}

fn ex10(lin: [i64; 2]) -> Result<Expr> {
    form(3, &[i(2), i(2)], &[(0, 1, i(2))], &lin.map(i))
}

fn over_j3(parts: &[(i64, i64, i64)]) -> Expr {
    sum(parts
        .iter()
        .map(|&(c, e0, a)| eta(e().jam(a, 45, 1).j(3, -1).times(&mono(i(c), i(e0)))))
        .collect())
}

fn four_thirds(v: &mut Vec<IdentityEntry>) {
    v.push(entry("vz-exam10-1", "double sum with matrix (4/3, 2/3; 2/3, 4/3), zero linear part", ORDER, |_| {
        Ok(Identity::new(ex10([0, 0])?, over_j3(&[(1, 0, 21), (-1, 3, 6), (2, 2, 9)])))
    }));
    v.push(entry("vz-exam10-2", "double sum with matrix (4/3, 2/3; 2/3, 4/3), linear part (-2, -1)", ORDER, |_| {
        Ok(Identity::new(ex10([-2, -1])?, over_j3(&[(2, 0, 18), (1, 1, 12), (1, 4, 3)])))
    }));
    v.push(entry("dissect-S0", "(4/3, 2/3; 2/3, 4/3) sum restricted to i - j = 0 mod 3", ORDER, |_| {
        Ok(Identity::new(ex10([0, 0])?.dissect(3, 0), over_j3(&[(1, 0, 21), (-1, 3, 6)])))
    }));
    // i - j = ±1 contribute equally to the exponents = 2 mod 3.
    v.push(entry("dissect-S1", "(4/3, 2/3; 2/3, 4/3) sum restricted to i - j = 1 mod 3", ORDER, |_| {
        Ok(Identity::new(
            ex10([0, 0])?.dissect(3, 2).scale(Monomial::constant(r(1, 2))),
            over_j3(&[(1, 2, 9)]),
        ))
    }));
    v.push(entry("dissect-T01", "shifted (4/3, 2/3; 2/3, 4/3) sum restricted to i - j = 0, 1 mod 3", ORDER, |_| {
        Ok(Identity::new(ex10([-2, -1])?.dissect(3, 0), over_j3(&[(2, 0, 18)])))
    }));
    v.push(entry("dissect-Tm1", "shifted (4/3, 2/3; 2/3, 4/3) sum restricted to i - j = -1 mod 3", ORDER, |_| {
        Ok(Identity::new(ex10([-2, -1])?.dissect(3, 1), over_j3(&[(1, 1, 12), (1, 4, 3)])))
    }));
}

/// The lift of the rank-two family at a = 3/2, read over `(q⁴;q⁴)`.
fn lift32(lin: &[Rational]) -> Result<Expr> {
    form(4, &[i(3), i(3), i(4)], &[(0, 1, i(2)), (0, 2, i(4)), (1, 2, i(4))], lin)
}

/// The dual of that lift, read over `(q^s;q^s)` for `s ∈ {2, 4}`.
fn dual32(sub: i64, lin: [i64; 3]) -> Result<Expr> {
    let h = i(sub / 2);
    form(sub, &[h.clone(), h.clone(), h.clone()], &[(0, 2, -h.clone()), (1, 2, -h)], &lin.map(i))
}

fn over_q4(factors: &[(Monomial, i64)]) -> Expr {
    let mut f: Vec<(Monomial, Rational, i32)> = factors.iter().map(|(a, b)| (a.clone(), i(*b), 1)).collect();
    f.push((qi(4), i(4), -1));
    Expr::product(&f)
}

fn lifted(v: &mut Vec<IdentityEntry>) {
    v.push(family(
        "lift-vz32-1",
        "lift at a = 3/2 of the first rank-two identity",
        &["c"],
        vec![bind(&[("c", rv(0, 1))]), bind(&[("c", rv(1, 1))]), bind(&[("c", rv(2, 1))]), bind(&[("c", rv(1, 2))])],
        ORDER,
        |b| {
            let c = b.rat("c")?;
            let lhs = lift32(&[c.clone(), -c.clone(), i(0)])?;
            let rhs = over_q4(&[(neg(q(i(3) + &c)), 6), (neg(q(i(3) - &c)), 6), (qi(6), 6)]);
            Ok(Identity::new(lhs, rhs))
        },
        no_check,
    ));
    v.push(entry("lift-vz32-2", "lift at a = 3/2 of the second rank-two identity", ORDER, |_| {
        let lhs = lift32(&[i(-2), i(-2), i(-4)])?;
        let rhs = over_q4(&[(neg(qi(1)), 6), (neg(qi(5)), 6), (qi(6), 6)]).scale(Monomial::constant(i(2)));
        Ok(Identity::new(lhs, rhs))
    }));
    v.push(entry("lift-vz32-3", "lift at a = 3/2 of the third rank-two identity", ORDER, |_| {
        let lhs = lift32(&[i(1), i(3), i(4)])?;
        Ok(Identity::new(lhs, over_q4(&[(neg(qi(6)), 6), (neg(qi(6)), 6), (qi(6), 6)])))
    }));
    v.push(family(
        "thm62-family",
        "lifted sum with u^(i+j+2k) equals (-uq;q²)_∞",
        &["u"],
        vec![
            bind(&[("u", mv(i(1), i(0)))]),
            bind(&[("u", qv(i(-1)))]),
            bind(&[("u", qv(i(1)))]),
            bind(&[("u", qv(i(2)))]),
        ],
        ORDER,
        |b| {
            let t = b.mono("u")?.exp;
            let lhs = lift32(&[t.clone(), &t - i(2), &t * i(2)])?;
            Ok(Identity::new(lhs, Expr::product(&[(neg(q(t + i(1))), i(2), 1)])))
        },
        |b| {
            if !b.mono("u")?.coeff.is_one() {
                return Err(Error::InvalidBinding("u must be a pure power of q".into()));
            }
            Ok(())
        },
    ));
    let nonmod_a = || {
        e().j(1, 2).j(4, 1).j(2, -1)
    };
    let nonmod_b = || e().j(2, 2).j(3, 1).j(12, 1).j(1, -1).j(4, -2).j(6, -1);
    v.push(entry("nonmod-1", "lifted sum with linear part (2, 2, 0)", ORDER, move |_| {
        let rhs = sum(vec![
            eta(nonmod_a().times(&mono(r(1, 3), i(0)))),
            eta(nonmod_b().times(&mono(r(2, 3), i(0)))),
        ]);
        Ok(Identity::new(lift32(&[i(2), i(2), i(0)])?, rhs))
    }));
    v.push(entry("nonmod-2", "lifted sum with linear part (4, 4, 4)", ORDER, move |_| {
        let rhs = sum(vec![
            eta(nonmod_a().times(&mono(r(-1, 3), i(-1)))),
            eta(nonmod_b().times(&mono(r(1, 3), i(-1)))),
        ]);
        Ok(Identity::new(lift32(&[i(4), i(4), i(4)])?, rhs))
    }));
    v.push(entry("wang-2.34", "weighted bilateral sum of q^(3k²+2k)", ORDER, |_| {
        let lhs = Expr::Bilateral { quad: i(3), lin: i(2), poly: vec![i(1), i(1)] };
        let rhs = sum(vec![
            eta(e().j(1, 2).j(4, 2).j(2, -1).times(&mono(r(1, 3), i(0)))),
            eta(e().j(2, 2).j(3, 1).j(12, 1).j(1, -1).j(4, -1).j(6, -1).times(&mono(r(2, 3), i(0)))),
        ]);
        Ok(Identity::new(lhs, rhs))
    }));
    v.push(entry("key-1", "single sum with (-1;q)_n²", ORDER, |_| {
        let s = single(i(1), i(0)).poch(minus_one(), i(1), 1, 0, 2).poch(qi(1), i(1), 2, 0, -1);
        let rhs = sum(vec![
            eta(e().j(2, 1).j(3, 2).j(1, -2).j(6, -1).times(&mono(r(4, 3), i(0)))),
            eta(e().j(1, 4).j(2, -2).times(&mono(r(-1, 3), i(0)))),
        ]);
        Ok(Identity::new(Expr::sum(s), rhs))
    }));
    v.push(entry("key-2", "single sum with (-q;q²)_n²", ORDER, |_| {
        let s = single(i(2), i(2)).poch(neg(qi(1)), i(2), 1, 0, 2).poch(qi(2), i(2), 2, 1, -1);
        let rhs = sum(vec![
            eta(e().j(1, 2).j(4, 2).j(2, -2).times(&mono(r(1, 3), i(0)))),
            eta(e().j(2, 1).j(3, 1).j(12, 1).j(1, -1).j(4, -1).j(6, -1).times(&mono(r(2, 3), i(0)))),
        ]);
        Ok(Identity::new(Expr::sum(s), rhs))
    }));
    v.push(entry("relation", "difference of two lifted sums is q times a third", ORDER, |_| {
        let lhs = sum(vec![
            lift32(&[i(2), i(-2), i(0)])?,
            lift32(&[i(2), i(2), i(0)])?.scale(Monomial::constant(i(-1))),
        ]);
        Ok(Identity::new(lhs, lift32(&[i(4), i(4), i(4)])?.scale(qi(1))))
    }));
    v.push(family(
        "thm63-1",
        "dual lift with linear part (0, -2, a) equals (-1, -q^a; q²)_∞",
        &["a"],
        vec![bind(&[("a", rv(1, 1))]), bind(&[("a", rv(2, 1))]), bind(&[("a", rv(3, 1))])],
        ORDER,
        |b| {
            let a = b.rat("a")?;
            let lhs = form(4, &[i(2), i(2), i(2)], &[(0, 2, i(-2)), (1, 2, i(-2))], &[i(0), i(-2), a.clone()])?;
            Ok(Identity::new(lhs, Expr::product(&[(minus_one(), i(2), 1), (neg(q(a)), i(2), 1)])))
        },
        no_check,
    ));
    v.push(family(
        "thm63-2",
        "dual lift with linear part (1, -1, b) as a single sum",
        &["b"],
        vec![bind(&[("b", rv(0, 1))]), bind(&[("b", rv(1, 1))]), bind(&[("b", rv(2, 1))])],
        ORDER,
        |b| {
            let bb = b.rat("b")?;
            let lhs = form(4, &[i(2), i(2), i(2)], &[(0, 2, i(-2)), (1, 2, i(-2))], &[i(1), i(-1), bb.clone()])?;
            let s = single(i(1), bb).poch(neg(qi(1)), i(2), 1, 0, 1).poch(qi(4), i(4), 1, 0, -1);
            let rhs = Expr::mul(vec![Expr::product(&[(neg(qi(1)), i(2), 1)]), Expr::sum(s)]);
            Ok(Identity::new(lhs, rhs))
        },
        no_check,
    ));
    v.push(entry("thm63-3", "dual lift with linear part (1, -1, 2)", ORDER, |_| {
        Ok(Identity::new(dual32(4, [1, -1, 2])?, eta(e().j(2, 2).j(6, 2).j(1, -1).j(3, -1).j(4, -2))))
    }));
    v.push(family(
        "thm63-4",
        "dual lift with linear part (-c, c, 0)",
        &["c"],
        vec![bind(&[("c", rv(0, 1))]), bind(&[("c", rv(1, 1))]), bind(&[("c", rv(2, 1))])],
        ORDER,
        |b| {
            let c = index(&b.rat("c")?)?;
            let rhs = sum(vec![
                eta(e().jbar(2 + c, 4, 1).jbar(6 + c, 12, 1).j(4, -2)),
                eta(e().jbar(-c, 4, 1).jbar(c, 12, 1).j(4, -2).with_q(i(2))),
            ]);
            Ok(Identity::new(dual32(4, [-c, c, 0])?, rhs))
        },
        |b| index(&b.rat("c")?).map(|_| ()),
    ));
    let cubes = |c: i64| eta(e().j(3, 3).j(1, -1).j(2, -2).with_coeff(c));
    v.push(entry("thm63-5", "dual lift over (q²;q²) with linear part (0, 0, -1)", ORDER, move |_| {
        Ok(Identity::new(dual32(2, [0, 0, -1])?, cubes(6)))
    }));
    v.push(entry("thm63-6", "dual lift over (q²;q²) with linear part (1, 1, -1)", ORDER, move |_| {
        Ok(Identity::new(dual32(2, [1, 1, -1])?, cubes(2)))
    }));
    v.push(entry("thm63-7", "dual lift over (q²;q²) with linear part (1, 1, 0)", ORDER, move |_| {
        Ok(Identity::new(dual32(2, [1, 1, 0])?, cubes(1)))
    }));
}

fn add_sum(lin: i64, shift: u32) -> HypergeomSumSpec {
    single(i(2), i(lin)).poch(neg(qi(1)), i(2), 1, 0, 1).poch(qi(1), i(2), 1, shift, -1).poch(qi(4), i(4), 1, 0, -1)
}

fn auxiliary(v: &mut Vec<IdentityEntry>) {
    v.push(entry("add-id-1", "dual lift over (q²;q²) split into a single sum", ORDER, |_| {
        let rhs = sum(vec![
            Expr::mul(vec![eta(e().j(2, 4).j(1, -2).j(4, -2)), Expr::sum(add_sum(-2, 0))]),
            eta(e().j(4, 3).j(6, 2).j(2, -4).j(12, -1).with_coeff(4)),
        ]);
        Ok(Identity::new(dual32(2, [0, 0, -1])?, rhs))
    }));
    v.push(entry("add-id-2", "single sum over (q;q²)_{i+1}(q⁴;q⁴)_i", ORDER, |_| {
        Ok(Identity::new(Expr::sum(add_sum(2, 1)), eta(e().jbar(1, 6, 1).j(2, -1))))
    }));
    v.push(entry("add-id-3", "single sum over (q;q²)_i(q⁴;q⁴)_i", ORDER, |_| {
        Ok(Identity::new(Expr::sum(add_sum(-2, 0)), eta(e().jbar(1, 6, 1).j(2, -1).with_coeff(2))))
    }));
    v.push(entry("add-id-4", "dual lift over (q²;q²) as two eta quotients", ORDER, |_| {
        let rhs = sum(vec![
            eta(e().j(2, 5).j(3, 1).j(12, 1).j(1, -3).j(4, -3).j(6, -1).with_coeff(2)),
            eta(e().j(4, 3).j(6, 2).j(2, -4).j(12, -1).with_coeff(4)),
        ]);
        Ok(Identity::new(dual32(2, [0, 0, -1])?, rhs))
    }));
    v.push(entry("add-id-5", "dual lift over (q²;q²) with linear part (-1, 1, 0)", ORDER, |_| {
        let rhs = sum(vec![
            eta(e().j(4, 3).j(6, 2).j(2, -4).j(12, -1).with_coeff(2)),
            eta(e().j(2, 5).j(3, 1).j(12, 1).j(1, -3).j(4, -3).j(6, -1)),
        ]);
        Ok(Identity::new(dual32(2, [-1, 1, 0])?, rhs))
    }));
    v.push(entry("3core-1", "2-dissection of J_3³/J_1", ORDER, |_| {
        let rhs = sum(vec![
            eta(e().j(4, 3).j(6, 2).j(2, -2).j(12, -1)),
            eta(e().j(12, 3).j(4, -1).with_q(i(1))),
        ]);
        Ok(Identity::new(eta(e().j(3, 3).j(1, -1)), rhs))
    }));
    v.push(entry("3core-2", "2-dissection of J_3/J_1³", ORDER, |_| {
        let rhs = sum(vec![
            eta(e().j(4, 6).j(6, 3).j(2, -9).j(12, -2)),
            eta(e().j(4, 2).j(6, 1).j(12, 2).j(2, -7).times(&mono(i(3), i(1)))),
        ]);
        Ok(Identity::new(eta(e().j(3, 1).j(1, -3)), rhs))
    }));
}
