//! Evaluation of parsed expressions into distributions, operators or functions.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::parse::{parse, Expr, Power};
use crate::action::GroupFunction;
use crate::diffops::{Chart, DiffOp};
use crate::dist::commutator::binomial_of;
use crate::dist::DistElement;
use crate::error::{Error, Result};
use crate::group::{CoordinateKind, GroupKind};
use crate::padic::{factorial, LevelContext, Rational};

/// What the identifiers of an expression refer to.
#[derive(Clone, Debug)]
pub enum Domain {
    Dist { group: GroupKind, ctx: LevelContext },
    Op { ctx: LevelContext, chart: Chart },
    Func { group: GroupKind },
}

#[derive(Clone, Debug, PartialEq)]
enum Value {
    Scalar(Rational),
    Dist(DistElement),
    Op(DiffOp),
    Func(GroupFunction),
}

fn type_error<T>(what: &str) -> Result<T> {
    Err(Error::Malformed(format!("cannot {what} these operands")))
}

impl Domain {
    fn lift(&self, c: Rational) -> Result<Value> {
        Ok(match self {
            Domain::Dist { group, ctx } => Value::Dist(DistElement::constant(group.clone(), *ctx, c)),
            Domain::Op { ctx, chart } => Value::Op(DiffOp::constant(*ctx, *chart, c)),
            Domain::Func { group } => {
                let n = group.coordinate_kinds().map_or(0, |k| k.len());
                Value::Func(GroupFunction::new(group.clone(), [(vec![0; n], c)])?)
            }
        })
    }

    fn generator(&self, name: &str, power: Power) -> Result<Value> {
        match self {
            Domain::Dist { group, ctx } => Ok(Value::Dist(match power {
                Power::One => DistElement::generator(group.clone(), *ctx, name, 1)?,
                Power::Level(k) => DistElement::generator(group.clone(), *ctx, name, k)?,
                Power::Kostant(k) => DistElement::kostant_generator(group.clone(), *ctx, name, k)?,
            })),
            Domain::Op { ctx, chart } => {
                if name == "d" {
                    let (k, div) = match power {
                        Power::One => (1, BigInt::one()),
                        Power::Level(k) => (k, BigInt::one()),
                        Power::Kostant(k) => (k, ctx.q_factorial(k as u64)),
                    };
                    return Ok(Value::Op(DiffOp::derivation(*ctx, *chart, k).scale(&Rational::new(BigInt::one(), div))));
                }
                if name == chart.coordinate() && power == Power::One {
                    return Ok(Value::Op(DiffOp::monomial(*ctx, *chart, 1, 0, Rational::one())?));
                }
                Err(Error::UnknownGenerator(name.to_string()))
            }
            Domain::Func { group } => {
                let kinds = group.coordinate_kinds().ok_or_else(|| Error::UnsupportedGroup(group.to_string()))?;
                let n = kinds.len();
                let i = match name {
                    "t" | "T" if n == 1 => 0,
                    _ => name
                        .strip_prefix("T_")
                        .or_else(|| name.strip_prefix("t_"))
                        .and_then(|s| s.parse::<usize>().ok())
                        .filter(|i| (1..=n).contains(i))
                        .map(|i| i - 1)
                        .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?,
                };
                if power != Power::One {
                    return Err(Error::UnknownGenerator(format!("{name} takes no divided power")));
                }
                let mut e = vec![0; n];
                e[i] = 1;
                Ok(Value::Func(GroupFunction::new(group.clone(), [(e, Rational::one())])?))
            }
        }
    }

    fn eval(&self, e: &Expr) -> Result<Value> {
        match e {
            Expr::Int(n) => Ok(Value::Scalar(Rational::from_integer(n.clone()))),
            Expr::Factorial(x) => match self.eval(x)? {
                Value::Scalar(c) if c.is_integer() && !c.is_negative() => {
                    let n = c.to_integer().to_u64().ok_or_else(|| Error::Malformed("factorial too large".into()))?;
                    Ok(Value::Scalar(Rational::from_integer(factorial(n))))
                }
                _ => type_error("take the factorial of"),
            },
            Expr::Gen { name, power } => self.generator(name, *power),
            Expr::Binom(x, k) => match (self.eval(x)?, self) {
                (Value::Dist(u), _) => Ok(Value::Dist(binomial_of(&u, 0, *k)?)),
                (Value::Scalar(c), _) => {
                    let mut out = Rational::one();
                    for r in 0..*k {
                        out *= (&c - Rational::from_integer(BigInt::from(r))) / Rational::from_integer(BigInt::from(r + 1));
                    }
                    Ok(Value::Scalar(out))
                }
                _ => type_error("take binomials of"),
            },
            Expr::Neg(x) => self.mul(Value::Scalar(-Rational::one()), self.eval(x)?),
            Expr::Add(a, b) => self.add(self.eval(a)?, self.eval(b)?),
            Expr::Sub(a, b) => {
                let nb = self.mul(Value::Scalar(-Rational::one()), self.eval(b)?)?;
                self.add(self.eval(a)?, nb)
            }
            Expr::Mul(a, b) => self.mul(self.eval(a)?, self.eval(b)?),
            Expr::Div(a, b) => match self.eval(b)? {
                Value::Scalar(c) if !c.is_zero() => self.mul(Value::Scalar(c.recip()), self.eval(a)?),
                Value::Scalar(_) => Err(Error::Malformed("division by zero".into())),
                _ => type_error("divide by"),
            },
            Expr::Pow(x, k) => self.pow(self.eval(x)?, *k),
            Expr::Bracket(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                let ab = self.mul(a.clone(), b.clone())?;
                let ba = self.mul(b, a)?;
                let nba = self.mul(Value::Scalar(-Rational::one()), ba)?;
                self.add(ab, nba)
            }
        }
    }

    fn add(&self, a: Value, b: Value) -> Result<Value> {
        Ok(match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(x + y),
            (Value::Scalar(x), v) | (v, Value::Scalar(x)) => return self.add(self.lift(x)?, v),
            (Value::Dist(x), Value::Dist(y)) => Value::Dist(x.add(&y)?),
            (Value::Op(x), Value::Op(y)) => Value::Op(x.add(&y)?),
            (Value::Func(x), Value::Func(y)) => Value::Func(x.add(&y)?),
            _ => return type_error("add"),
        })
    }

    fn mul(&self, a: Value, b: Value) -> Result<Value> {
        Ok(match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(x * y),
            (Value::Scalar(c), Value::Dist(u)) | (Value::Dist(u), Value::Scalar(c)) => Value::Dist(u.scale(&c)),
            (Value::Scalar(c), Value::Op(u)) | (Value::Op(u), Value::Scalar(c)) => Value::Op(u.scale(&c)),
            (Value::Scalar(c), Value::Func(u)) | (Value::Func(u), Value::Scalar(c)) => Value::Func(u.scale(&c)),
            (Value::Dist(x), Value::Dist(y)) => Value::Dist(x.mul(&y)?),
            (Value::Op(x), Value::Op(y)) => Value::Op(x.compose(&y)?),
            (Value::Func(x), Value::Func(y)) => Value::Func(x.mul(&y)?),
            _ => return type_error("multiply"),
        })
    }

    fn pow(&self, v: Value, k: i64) -> Result<Value> {
        if k >= 0 {
            let k = k as u32;
            return Ok(match v {
                Value::Scalar(c) => Value::Scalar(num_traits::pow(c, k as usize)),
                Value::Dist(u) => Value::Dist(u.pow(k)?),
                Value::Op(u) => Value::Op(u.pow(k)?),
                Value::Func(u) => {
                    let mut out = self.lift(Rational::one())?;
                    for _ in 0..k {
                        out = self.mul(out, Value::Func(u.clone()))?;
                    }
                    out
                }
            });
        }
        match v {
            Value::Scalar(c) if !c.is_zero() => Ok(Value::Scalar(num_traits::pow(c.recip(), (-k) as usize))),
            // negative powers: only of a single coordinate monomial
            Value::Op(u) => {
                let mut terms = u.terms();
                match (terms.next(), terms.next()) {
                    (Some((j, 0, c)), None) if c.is_one() => {
                        Ok(Value::Op(DiffOp::monomial(*u.ctx(), u.chart(), j * k, 0, Rational::one())?))
                    }
                    _ => Err(Error::Malformed("only a coordinate can be raised to a negative power".into())),
                }
            }
            Value::Func(f) => {
                let kinds = f.group().coordinate_kinds().unwrap_or_default();
                let mut terms = f.terms();
                match (terms.next(), terms.next()) {
                    (Some((e, c)), None)
                        if c.is_one()
                            && e.iter().zip(&kinds).all(|(&x, kind)| x == 0 || *kind == CoordinateKind::Multiplicative) =>
                    {
                        let e: Vec<i64> = e.iter().map(|x| x * k).collect();
                        Ok(Value::Func(GroupFunction::new(f.group().clone(), [(e, Rational::one())])?))
                    }
                    _ => Err(Error::Malformed("only a torus coordinate can be raised to a negative power".into())),
                }
            }
            _ => Err(Error::Malformed("negative power of a non-invertible element".into())),
        }
    }
}

fn finish(domain: &Domain, v: Value) -> Result<Value> {
    match v {
        Value::Scalar(c) => domain.lift(c),
        v => Ok(v),
    }
}

pub fn eval_dist(text: &str, group: &GroupKind, ctx: LevelContext) -> Result<DistElement> {
    let d = Domain::Dist { group: group.clone(), ctx };
    match finish(&d, d.eval(&parse(text)?)?)? {
        Value::Dist(u) => Ok(u),
        _ => unreachable!(),
    }
}

pub fn eval_op(text: &str, ctx: LevelContext, chart: Chart) -> Result<DiffOp> {
    let d = Domain::Op { ctx, chart };
    match finish(&d, d.eval(&parse(text)?)?)? {
        Value::Op(u) => Ok(u),
        _ => unreachable!(),
    }
}

pub fn eval_function(text: &str, group: &GroupKind) -> Result<GroupFunction> {
    let d = Domain::Func { group: group.clone() };
    match finish(&d, d.eval(&parse(text)?)?)? {
        Value::Func(u) => Ok(u),
        _ => unreachable!(),
    }
}
