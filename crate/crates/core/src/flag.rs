//! Global differential operators on the projective line, and the comparison
//! with the central reduction of the distribution algebra of `SL_2`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::diffops::{chart_transform as transform, qmap_twisted, sl2_generator_images, Chart, ChartFunction, DiffOp};
use crate::dist::{DistElement, PbwKey};
use crate::error::{Error, Result};
use crate::group::GroupKind;
use crate::linalg;
use crate::padic::{binomial, LevelContext, MultiIndex, Rational};

/// Default bound on the order for the global-section solver.
pub const DEFAULT_ORDER_BOUND: u32 = 8;

/// The line bundle `O(lambda)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TwistDatum {
    pub lambda: i64,
}

impl TwistDatum {
    pub fn untwisted() -> Self {
        TwistDatum { lambda: 0 }
    }

    pub fn new(lambda: i64) -> Self {
        TwistDatum { lambda }
    }
}

pub fn chart_transform(op: &DiffOp, twist: TwistDatum) -> Result<DiffOp> {
    transform(op, twist.lambda)
}

/// `Q` for `SL_2` acting on `O(lambda)` over the given chart.
pub fn qmap_on_bundle(u: &DistElement, chart: Chart, twist: TwistDatum) -> Result<DiffOp> {
    qmap_twisted(u, chart, twist.lambda)
}

/// An operator on chart 0 is global when its coefficients are polynomial and
/// its transform to chart 1 has no poles.
pub fn is_global(op: &DiffOp, twist: TwistDatum) -> Result<bool> {
    if op.chart() != Chart::P1(0) {
        return Err(Error::Malformed("globality is tested on chart 0".into()));
    }
    Ok(op.is_pole_free() && chart_transform(op, twist)?.is_pole_free())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlobalSectionLattice {
    pub order: u32,
    pub ctx: LevelContext,
    pub twist: TwistDatum,
    /// chart-0 presentations
    pub basis: Vec<DiffOp>,
}

impl GlobalSectionLattice {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn unknowns(n: u32) -> Vec<(i64, u32)> {
    (0..=n).flat_map(|k| (0..=2 * n as i64).map(move |j| (j, k))).collect()
}

fn coordinates(op: &DiffOp, cols: &[(i64, u32)]) -> Vec<Rational> {
    cols.iter().map(|&(j, k)| op.coefficient(j, k)).collect()
}

/// Operators `sum_{j <= 2n, k <= n} a_{jk} t^j d^<k>` that extend over chart 1.
pub fn global_sections(n: u32, ctx: LevelContext, twist: TwistDatum) -> Result<GlobalSectionLattice> {
    if n > DEFAULT_ORDER_BOUND {
        return Err(Error::OrderBoundExceeded { n, bound: DEFAULT_ORDER_BOUND });
    }
    global_sections_unbounded(n, ctx, twist)
}

pub fn global_sections_unbounded(n: u32, ctx: LevelContext, twist: TwistDatum) -> Result<GlobalSectionLattice> {
    let cols = unknowns(n);
    // the pole part of each transformed unknown
    let images: Vec<DiffOp> = cols
        .iter()
        .map(|&(j, k)| chart_transform(&DiffOp::monomial(ctx, Chart::P1(0), j, k, Rational::one())?, twist))
        .collect::<Result<_>>()?;
    let mut pole_keys: Vec<(i64, u32)> = images
        .iter()
        .flat_map(|im| im.terms().filter(|(j, _, _)| *j < 0).map(|(j, k, _)| (j, k)).collect::<Vec<_>>())
        .collect();
    pole_keys.sort();
    pole_keys.dedup();
    let rows: Vec<Vec<Rational>> = pole_keys
        .iter()
        .map(|&(j, k)| images.iter().map(|im| im.coefficient(j, k)).collect())
        .collect();
    let null = linalg::nullspace(&rows, cols.len());
    let basis = null
        .into_iter()
        .map(|v| DiffOp::from_terms(ctx, Chart::P1(0), cols.iter().zip(v).map(|(&(j, k), c)| (j, k, c))))
        .collect::<Result<_>>()?;
    Ok(GlobalSectionLattice { order: n, ctx, twist, basis })
}

/// The Casimir `Omega = h^2/2 + h + 2 f e` and its character value.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralElement {
    pub omega: DistElement,
    pub theta: Rational,
}

/// `Omega` in the divided-power basis of the given context.
pub fn casimir(ctx: LevelContext) -> Result<DistElement> {
    let g = GroupKind::sl2();
    let h = DistElement::generator(g.clone(), ctx, "h", 1)?;
    let e = DistElement::generator(g.clone(), ctx, "e", 1)?;
    let f = DistElement::generator(g, ctx, "f", 1)?;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let two = Rational::from_integer(BigInt::from(2));
    h.mul(&h)?.scale(&half).add(&h)?.add(&f.mul(&e)?.scale(&two))
}

/// `Omega` commutes with `e, h, f` and has no constant term.
pub fn casimir_is_central_augmentation(ctx: LevelContext) -> Result<bool> {
    let omega = casimir(ctx)?;
    let g = omega.group().clone();
    for label in ["e", "h", "f"] {
        let x = DistElement::generator(g.clone(), ctx, label, 1)?;
        if !omega.commutator(&x)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(omega.coefficient(&PbwKey::zero_for(&g)).is_zero())
}

/// Matrices of `rho = -Q` on the sections `1, t, .., t^lambda` of `O(lambda)`
/// over chart 0, then `rho(Omega) = rho(h)^2/2 + rho(h) + 2 rho(f) rho(e)`.
fn theta_on_sections(ctx: LevelContext, lambda: i64) -> Result<Rational> {
    let dim = lambda as usize + 1;
    let [qe, qh, qf] = sl2_generator_images(ctx, lambda);
    let matrix = |op: &DiffOp| -> Result<Vec<Vec<Rational>>> {
        let mut m = vec![vec![Rational::zero(); dim]; dim];
        for col in 0..dim {
            let out = op.apply(&ChartFunction::from([(col as i64, Rational::one())]))?;
            for (e, c) in out {
                if e < 0 || e as usize >= dim {
                    return Err(Error::Malformed("section space is not stable".into()));
                }
                m[e as usize][col] = -c;
            }
        }
        Ok(m)
    };
    let mul = |a: &Vec<Vec<Rational>>, b: &Vec<Vec<Rational>>| -> Vec<Vec<Rational>> {
        (0..dim)
            .map(|i| (0..dim).map(|j| (0..dim).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
            .collect()
    };
    let (re, rh, rf) = (matrix(&qe)?, matrix(&qh)?, matrix(&qf)?);
    let hh = mul(&rh, &rh);
    let fe = mul(&rf, &re);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let two = Rational::from_integer(BigInt::from(2));
    let omega: Vec<Vec<Rational>> = (0..dim)
        .map(|i| (0..dim).map(|j| &hh[i][j] * &half + &rh[i][j] + &fe[i][j] * &two).collect())
        .collect();
    let theta = omega[0][0].clone();
    for i in 0..dim {
        for j in 0..dim {
            let expect = if i == j { theta.clone() } else { Rational::zero() };
            if omega[i][j] != expect {
                return Err(Error::Malformed("Casimir does not act by a scalar on sections".into()));
            }
        }
    }
    Ok(theta)
}

/// `theta(Omega)`, computed on both charts and on the section space; the
/// computations must agree.
pub fn theta_character(ctx: LevelContext, twist: TwistDatum) -> Result<CentralElement> {
    if twist.lambda < 0 {
        return Err(Error::Malformed("twist must be non-negative".into()));
    }
    let omega = casimir(ctx)?;
    let mut chart_values = Vec::new();
    for chart in [Chart::P1(0), Chart::P1(1)] {
        let op = qmap_on_bundle(&omega, chart, twist)?;
        chart_values.push(op.as_constant().ok_or_else(|| Error::Malformed(format!("Q(Omega) = {op} is not a constant")))?);
    }
    let on_sections = theta_on_sections(ctx, twist.lambda)?;
    if chart_values.iter().any(|v| *v != on_sections) {
        return Err(Error::Malformed(format!(
            "theta disagreement: charts give {:?}, sections give {on_sections}",
            chart_values.iter().map(|v| v.to_string()).collect::<Vec<_>>()
        )));
    }
    Ok(CentralElement { omega, theta: on_sections })
}

/// PBW power monomials `e^a h^b f^c` with `a + b + c <= n`, as elements.
fn enveloping_basis(n: u32, ctx: LevelContext) -> Result<Vec<DistElement>> {
    let g = GroupKind::sl2();
    let e = DistElement::generator(g.clone(), ctx, "e", 1)?;
    let h = DistElement::generator(g.clone(), ctx, "h", 1)?;
    let f = DistElement::generator(g, ctx, "f", 1)?;
    let mut out = Vec::new();
    for deg in 0..=n {
        for a in 0..=deg {
            for b in 0..=(deg - a) {
                let c = deg - a - b;
                out.push(e.pow(a)?.mul(&h.pow(b)?)?.mul(&f.pow(c)?)?);
            }
        }
    }
    Ok(out)
}

fn divided_basis(n: u32, ctx: LevelContext) -> Result<Vec<DistElement>> {
    let g = GroupKind::sl2();
    let mut out = Vec::new();
    for a in 0..=n {
        for b in 0..=(n - a) {
            for c in 0..=(n - a - b) {
                let key = PbwKey::new(MultiIndex::new(vec![a]), MultiIndex::new(vec![b]), MultiIndex::new(vec![c]));
                out.push(DistElement::basis(g.clone(), ctx, key)?);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalizationReport {
    pub n: u32,
    pub p: u64,
    pub m: String,
    pub lambda: i64,
    pub theta: String,
    pub enveloping_dim: usize,
    pub image_rank: usize,
    pub global_dim: usize,
    pub kernel_dim: usize,
    pub central_kernel_dim: usize,
    /// (a) images of `U_{<=n}` are global
    pub images_global: bool,
    /// (b) the kernel is `(Omega - theta) U_{<=n-2}`
    pub kernel_matches: bool,
    /// (c) the images span the global sections
    pub surjective: bool,
    /// (d) images of the divided-power basis are global and integral in both charts
    pub integral_images: bool,
    pub casimir_central: bool,
    pub failures: Vec<String>,
    pub note: String,
}

impl LocalizationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn localization_check(n: u32, ctx: LevelContext, twist: TwistDatum) -> Result<LocalizationReport> {
    if n > DEFAULT_ORDER_BOUND {
        return Err(Error::OrderBoundExceeded { n, bound: DEFAULT_ORDER_BOUND });
    }
    let mut failures = Vec::new();
    let central = theta_character(ctx, twist)?;
    let cols = unknowns(n);
    let chart0 = |u: &DistElement| qmap_on_bundle(u, Chart::P1(0), twist);

    let basis = enveloping_basis(n, ctx)?;
    let images: Vec<DiffOp> = basis.iter().map(chart0).collect::<Result<_>>()?;
    let mut images_global = true;
    for im in &images {
        if !is_global(im, twist)? || im.order().unwrap_or(0) > n || im.terms().any(|(j, _, _)| j > 2 * n as i64) {
            images_global = false;
        }
    }
    if !images_global {
        failures.push("an image of U_{<=n} is not a global operator of order <= n".into());
    }
    let rows: Vec<Vec<Rational>> = images.iter().map(|im| coordinates(im, &cols)).collect();
    let image_rank = linalg::rank(&rows);
    let kernel_dim = basis.len() - image_rank;

    // (Omega - theta) U_{<=n-2} is killed and has the expected dimension
    let shifted = central.omega.sub(&DistElement::constant(central.omega.group().clone(), ctx, central.theta.clone()))?;
    let lower = if n >= 2 { enveloping_basis(n - 2, ctx)? } else { Vec::new() };
    let mut killed = true;
    for u in &lower {
        if !chart0(&shifted.mul(u)?)?.is_zero() {
            killed = false;
        }
    }
    let central_kernel_dim = if n >= 2 { binomial(n as u64 + 1, 3).try_into().unwrap_or(usize::MAX) } else { 0 };
    let kernel_matches = killed && kernel_dim == central_kernel_dim && central_kernel_dim == lower.len();
    if !kernel_matches {
        failures.push(format!(
            "kernel dimension {kernel_dim} vs central ideal dimension {central_kernel_dim} (killed: {killed})"
        ));
    }

    let global = global_sections_unbounded(n, ctx, twist)?;
    let surjective = image_rank == global.dim();
    if !surjective {
        failures.push(format!("image rank {image_rank} but {} global sections", global.dim()));
    }

    let mut integral_images = true;
    for u in divided_basis(n, ctx)? {
        let op0 = chart0(&u)?;
        let op1 = chart_transform(&op0, twist)?;
        if !(op0.is_integral() && op1.is_integral() && op0.is_pole_free() && op1.is_pole_free()) {
            integral_images = false;
            failures.push(format!("Q({u}) is not an integral global operator"));
            break;
        }
    }
    let casimir_central = casimir_is_central_augmentation(ctx)?;
    if !casimir_central {
        failures.push("Casimir is not central in the augmentation ideal".into());
    }
    Ok(LocalizationReport {
        n,
        p: ctx.p.get(),
        m: ctx.m.to_string(),
        lambda: twist.lambda,
        theta: central.theta.to_string(),
        enveloping_dim: basis.len(),
        image_rank,
        global_dim: global.dim(),
        kernel_dim,
        central_kernel_dim,
        images_global,
        kernel_matches,
        surjective,
        integral_images,
        casimir_central,
        failures,
        note: "finite-order statements only; the completed isomorphism is checked through these truncations".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, m: u32) -> LevelContext {
        LevelContext::finite(p, m).unwrap()
    }

    #[test]
    fn global_dimensions() {
        let c = ctx(2, 1);
        for n in 0..=3 {
            let g = global_sections(n, c, TwistDatum::untwisted()).unwrap();
            assert_eq!(g.dim(), ((n + 1) * (n + 1)) as usize, "n={n}");
            for op in &g.basis {
                assert!(is_global(op, TwistDatum::untwisted()).unwrap());
            }
        }
        assert!(global_sections(9, c, TwistDatum::untwisted()).is_err());
    }

    #[test]
    fn theta_values() {
        let c = ctx(3, 0);
        let expect = [(0, "0"), (1, "3/2"), (2, "4"), (3, "15/2")];
        for (l, v) in expect {
            let z = theta_character(c, TwistDatum::new(l)).unwrap();
            assert_eq!(z.theta.to_string(), v);
        }
        assert!(casimir_is_central_augmentation(c).unwrap());
    }

    #[test]
    fn small_localization() {
        let r = localization_check(2, ctx(2, 1), TwistDatum::untwisted()).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.global_dim, 9);
        let r = localization_check(2, ctx(3, 0), TwistDatum::new(2)).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.theta, "4");
    }
}
