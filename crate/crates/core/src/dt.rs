//! Motivic DT-series of preprojective algebras: the total series, its ray
//! factorization under a central charge, DT-invariants, and the comparison
//! with Kac polynomials.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::time::Instant;

use log::info;
use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::algebra::MotiveRat;
use crate::error::{Error, Result};
use crate::ff::is_prime;
use crate::fq::{class_sum_motive, count_moment_fiber, group_motive, interpolate_motive};
use crate::kac::{hua_kac, KacTable, RepSpace, ENUMERATION_GUARD};
use crate::quiver::{DimVector, Quiver};
use crate::series::{CentralCharge, TorusSeries, Truncation};

/// How a coefficient of the total series was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CoefficientSource {
    /// Raw fiber counts at these primes, interpolated with the degree bound
    /// `2N`; a final extra prime, when present, was held out.
    Interpolated {
        primes: Vec<u64>,
    },
    /// Closed-form class sum, checked against raw counts at these primes.
    ClosedForm {
        validated_at: Vec<u64>,
    },
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalSeries {
    pub series: TorusSeries,
    pub sources: BTreeMap<DimVector, CoefficientSource>,
}

/// Raw fiber count oracle, so callers can interpose a cache.
pub type Counter<'a> = dyn Fn(&Quiver, &DimVector, u64) -> Result<u64> + Sync + 'a;

fn primes_from(start: u64) -> impl Iterator<Item = u64> {
    (start..).filter(|&n| is_prime(n))
}

/// `sum_gamma L^{chi(gamma,gamma)} [mu^{-1}(0)] / [G_gamma] ê_gamma` over
/// `ht(gamma) <= bound`.
pub fn total_series(q: &Quiver, bound: u32, primes: &[u64]) -> Result<TotalSeries> {
    total_series_with(q, bound, primes, &count_moment_fiber)
}

pub fn total_series_with(
    q: &Quiver,
    bound: u32,
    primes: &[u64],
    counter: &Counter,
) -> Result<TotalSeries> {
    for &p in primes {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
    }
    let n = q.num_vertices();
    let trunc = Truncation::height(bound);
    let mut terms = Vec::new();
    let mut sources = BTreeMap::new();
    for g in trunc.vectors(n) {
        let (c, src) = if g.is_zero() {
            (MotiveRat::one(), CoefficientSource::Trivial)
        } else {
            total_coefficient(q, &g, primes, counter)?
        };
        terms.push((g.clone(), c));
        sources.insert(g, src);
    }
    Ok(TotalSeries {
        series: TorusSeries::from_terms(n, trunc, terms),
        sources,
    })
}

fn feasible(entries: usize, p: u64) -> bool {
    p.checked_pow(entries as u32)
        .is_some_and(|c| c <= ENUMERATION_GUARD)
}

fn total_coefficient(
    q: &Quiver,
    g: &DimVector,
    primes: &[u64],
    counter: &Counter,
) -> Result<(MotiveRat, CoefficientSource)> {
    let chi = q.euler_form_dim(g, g)?;
    let entries = RepSpace::new(q, g)?.entries();
    let degree = 2 * entries;
    let mut candidates: Vec<u64> = primes.to_vec();
    candidates.sort_unstable();
    candidates.dedup();
    let supplied = candidates.clone();
    candidates.retain(|&p| feasible(entries, p));
    candidates.truncate(degree + 2);
    let missing = degree + 2 - candidates.len();
    let extra: Vec<u64> = primes_from(2)
        .take_while(|&p| feasible(entries, p))
        .filter(|p| !supplied.contains(p))
        .take(missing)
        .collect();
    candidates.extend(extra);
    let usable = candidates;
    let weight = &MotiveRat::lefschetz_pow(chi) / &group_motive(g);

    if usable.len() > degree {
        let samples = usable
            .iter()
            .map(|&p| Ok((p, BigRational::from_integer(counter(q, g, p)?.into()))))
            .collect::<Result<Vec<_>>>()?;
        let fiber = interpolate_motive(&samples, degree)?;
        return Ok((
            &fiber * &weight,
            CoefficientSource::Interpolated { primes: usable },
        ));
    }

    let closed = class_sum_motive(q, g)?;
    let mut check: Vec<u64> = supplied
        .into_iter()
        .filter(|&p| feasible(entries, p))
        .collect();
    if check.is_empty() {
        check.extend(usable.first());
    }
    if check.is_empty() {
        return Err(Error::TooLarge(format!(
            "no prime admits a brute-force check of dimension {g}"
        )));
    }
    for &p in &check {
        let raw = BigRational::from_integer(counter(q, g, p)?.into());
        let predicted = (&closed / &weight).evaluate_at_prime(p)?;
        if raw != predicted {
            return Err(Error::OracleDisagreement(format!(
                "closed form predicts {predicted} fiber points for {g} at q = {p}, brute force finds {raw}"
            )));
        }
    }
    Ok((
        closed,
        CoefficientSource::ClosedForm {
            validated_at: check,
        },
    ))
}

/// Factor supported on one ray, labelled by its primitive direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayFactor {
    pub direction: DimVector,
    pub series: TorusSeries,
}

fn primitive(g: &DimVector) -> DimVector {
    g.divide(g.gcd())
}

/// Rays met by the nonzero classes of the truncation, by decreasing phase.
fn rays(a: &TorusSeries, z: &CentralCharge) -> Result<Vec<DimVector>> {
    if z.rank() != a.rank() {
        return Err(Error::VertexMismatch {
            expected: a.rank(),
            got: z.rank(),
        });
    }
    z.check_generic(a.bound())?;
    let mut dirs: Vec<DimVector> = a
        .vectors()
        .iter()
        .filter(|g| !g.is_zero())
        .map(primitive)
        .collect();
    dirs.sort();
    dirs.dedup();
    dirs.sort_by(|x, y| z.cmp_phase(y, x).then_with(|| x.cmp(y)));
    Ok(dirs)
}

fn on_ray(dir: &DimVector) -> impl Fn(&DimVector) -> bool + '_ {
    move |g| g.is_zero() || primitive(g) == *dir
}

fn check_unit(a: &TorusSeries) -> Result<()> {
    if !a.constant_term().is_one() {
        return Err(Error::NonUnitConstant);
    }
    Ok(())
}

/// Peels the ray of largest phase: its factor is the restriction of the
/// current series, since no sum of classes of smaller phase lands on it.
pub fn hn_factorize_recursive(a: &TorusSeries, z: &CentralCharge) -> Result<Vec<RayFactor>> {
    check_unit(a)?;
    let mut rest = a.clone();
    let mut out = Vec::new();
    for dir in rays(a, z)? {
        let factor = rest.restrict(on_ray(&dir));
        rest = rest.mul(&factor.inverse()?)?;
        out.push(RayFactor {
            direction: dir,
            series: factor,
        });
    }
    debug_assert!(rest.terms().count() == 1);
    Ok(out)
}

/// `A_l = Exp(Log(A) restricted to l)`.
pub fn hn_factorize_shortcut(a: &TorusSeries, z: &CentralCharge) -> Result<Vec<RayFactor>> {
    check_unit(a)?;
    let log = a.plethystic_log()?;
    rays(a, z)?
        .into_iter()
        .map(|dir| {
            let series = log.restrict(on_ray(&dir)).plethystic_exp()?;
            Ok(RayFactor {
                direction: dir,
                series,
            })
        })
        .collect()
}

/// Ray factorization, computed by both algorithms, which must agree.
pub fn hn_factorize(a: &TorusSeries, z: &CentralCharge) -> Result<Vec<RayFactor>> {
    let rec = hn_factorize_recursive(a, z)?;
    let short = hn_factorize_shortcut(a, z)?;
    if rec != short {
        return Err(Error::OracleDisagreement(
            "recursive division and Log restriction give different ray factors".into(),
        ));
    }
    Ok(rec)
}

pub fn product_of_factors(a: &TorusSeries, factors: &[RayFactor]) -> Result<TorusSeries> {
    factors
        .iter()
        .try_fold(TorusSeries::one(a.rank(), a.bound().clone()), |acc, f| {
            acc.mul(&f.series)
        })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaEntry {
    pub gamma: DimVector,
    pub omega: MotiveRat,
    /// Laurent polynomial in `L^{1/2}`.
    pub admissible: bool,
}

/// `Omega(gamma) = (1 - L) Log(A_l)_gamma` for every nonzero class of the
/// truncation.
pub fn extract_dt(a: &TorusSeries) -> Result<Vec<OmegaEntry>> {
    let log = a.plethystic_log()?;
    let one_minus_l = &MotiveRat::one() - &MotiveRat::lefschetz();
    let entries: Vec<OmegaEntry> = a
        .vectors()
        .into_iter()
        .filter(|g| !g.is_zero())
        .map(|g| {
            let omega = &log.coeff(&g).unwrap() * &one_minus_l;
            OmegaEntry {
                admissible: omega.is_laurent(),
                gamma: g,
                omega,
            }
        })
        .collect();
    let rebuilt = sym_of_omega(
        a.rank(),
        a.bound(),
        entries.iter().map(|e| (&e.gamma, &e.omega)),
    )?;
    if rebuilt != *a {
        return Err(Error::OracleDisagreement(
            "Sym of the extracted invariants does not reproduce the series".into(),
        ));
    }
    Ok(entries)
}

/// `Exp(sum Omega(gamma) ê_gamma / (1 - L))`.
pub fn sym_of_omega<'a>(
    rank: usize,
    bound: &Truncation,
    omega: impl IntoIterator<Item = (&'a DimVector, &'a MotiveRat)>,
) -> Result<TorusSeries> {
    let inv = (&MotiveRat::one() - &MotiveRat::lefschetz()).inv();
    let terms = omega.into_iter().map(|(g, o)| (g.clone(), o * &inv));
    TorusSeries::from_terms(rank, bound.clone(), terms).plethystic_exp()
}

/// Result of comparing the total series with the Kac-polynomial side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DtReport {
    pub quiver_hash: String,
    pub bound: u32,
    pub charge: CentralCharge,
    pub total: TorusSeries,
    pub rays: Vec<RayFactor>,
    pub sources: Vec<(DimVector, CoefficientSource)>,
    pub omega: Vec<OmegaEntry>,
    /// `-a_gamma(L) L`.
    pub expected_omega: Vec<(DimVector, MotiveRat)>,
    /// LHS minus RHS, coefficient-wise.
    pub residuals: Vec<(DimVector, MotiveRat)>,
    pub passed: bool,
}

/// `Exp(sum_gamma (-a_gamma(L) L) / (1 - L) ê_gamma)`.
pub fn kac_side(table: &KacTable, rank: usize) -> Result<TorusSeries> {
    let l = MotiveRat::lefschetz();
    let bound = Truncation::height(table.bound);
    sym_of_omega(
        rank,
        &bound,
        table
            .entries
            .iter()
            .map(|(g, a)| (g.clone(), -&(&a.to_motive() * &l)))
            .collect::<Vec<_>>()
            .iter()
            .map(|(g, m)| (g, m)),
    )
}

/// Builds both sides with the single-ray charge `z_i = sqrt(-1)` and
/// compares them.
pub fn verify_kac_conjecture(q: &Quiver, bound: u32, primes: &[u64]) -> Result<DtReport> {
    verify_kac_conjecture_with(q, bound, primes, &count_moment_fiber)
}

pub fn verify_kac_conjecture_with(
    q: &Quiver,
    bound: u32,
    primes: &[u64],
    counter: &Counter,
) -> Result<DtReport> {
    let start = Instant::now();
    let n = q.num_vertices();
    let total = total_series_with(q, bound, primes, counter)?;
    info!("total series for bound {bound} in {:?}", start.elapsed());
    let table = hua_kac(q, bound)?;
    let rhs = kac_side(&table, n)?;
    let lhs = &total.series;
    let residuals: Vec<(DimVector, MotiveRat)> = lhs
        .vectors()
        .into_iter()
        .map(|g| {
            let r = &lhs.coeff(&g).unwrap() - &rhs.coeff(&g).unwrap();
            (g, r)
        })
        .collect();
    let omega = extract_dt(lhs)?;
    let l = MotiveRat::lefschetz();
    let expected_omega: Vec<(DimVector, MotiveRat)> = table
        .entries
        .iter()
        .map(|(g, a)| (g.clone(), -&(&a.to_motive() * &l)))
        .collect();
    let passed = residuals.iter().all(|(_, r)| r.is_zero())
        && omega
            .iter()
            .zip(&expected_omega)
            .all(|(o, (g, e))| o.gamma == *g && o.omega == *e);
    info!("verification finished in {:?}", start.elapsed());
    Ok(DtReport {
        quiver_hash: q.canonical_hash(),
        bound,
        charge: CentralCharge::standard(n),
        rays: vec![RayFactor {
            direction: DimVector::zero(n),
            series: lhs.clone(),
        }],
        total: lhs.clone(),
        sources: total.sources.into_iter().collect(),
        omega,
        expected_omega,
        residuals,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub gamma: DimVector,
    pub omega_1: MotiveRat,
    pub omega_2: MotiveRat,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub charges: [CentralCharge; 2],
    pub ray_counts: [usize; 2],
    /// Product of the ray factors equals the series, per charge.
    pub factorization: [bool; 2],
    /// Recursive division agrees with Log restriction, per charge.
    pub algorithms_agree: [bool; 2],
    pub rows: Vec<StabilityRow>,
    pub passed: bool,
}

fn omega_by_ray(a: &TorusSeries, factors: &[RayFactor]) -> Result<BTreeMap<DimVector, MotiveRat>> {
    let mut out = BTreeMap::new();
    for f in factors {
        for e in extract_dt(&f.series)? {
            if on_ray(&f.direction)(&e.gamma) {
                out.insert(e.gamma, e.omega);
            }
        }
    }
    debug_assert_eq!(out.len() + 1, a.vectors().len());
    Ok(out)
}

/// Compares the DT-invariants read off the ray factors of two charges.
pub fn stability_invariance_check(
    a: &TorusSeries,
    z1: &CentralCharge,
    z2: &CentralCharge,
) -> Result<StabilityReport> {
    let mut ray_counts = [0; 2];
    let mut factorization = [false; 2];
    let mut agree = [false; 2];
    let mut tables = Vec::new();
    for (k, z) in [z1, z2].into_iter().enumerate() {
        let rec = hn_factorize_recursive(a, z)?;
        let short = hn_factorize_shortcut(a, z)?;
        ray_counts[k] = rec.len();
        agree[k] = rec == short;
        factorization[k] = product_of_factors(a, &rec)? == *a;
        tables.push(omega_by_ray(a, &rec)?);
    }
    let rows: Vec<StabilityRow> = tables[0]
        .iter()
        .map(|(g, o1)| {
            let o2 = tables[1][g].clone();
            StabilityRow {
                gamma: g.clone(),
                equal: *o1 == o2,
                omega_1: o1.clone(),
                omega_2: o2,
            }
        })
        .collect();
    let passed = factorization.iter().all(|&b| b)
        && agree.iter().all(|&b| b)
        && rows.iter().all(|r| r.equal);
    Ok(StabilityReport {
        charges: [z1.clone(), z2.clone()],
        ray_counts,
        factorization,
        algorithms_agree: agree,
        rows,
        passed,
    })
}

/// Phase order check used by reports: `Greater` when `a` comes first.
pub fn slope_order(z: &CentralCharge, a: &DimVector, b: &DimVector) -> Ordering {
    z.cmp_phase(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[u32]) -> DimVector {
        DimVector(v.to_vec())
    }

    fn m(s: &str) -> MotiveRat {
        s.parse().unwrap()
    }

    #[test]
    fn total_series_coefficients() {
        let j = total_series(&Quiver::jordan(), 1, &[2, 3, 5]).unwrap();
        assert_eq!(j.series.coeff(&dv(&[0])).unwrap(), MotiveRat::one());
        assert_eq!(j.series.coeff(&dv(&[1])).unwrap(), m("L^2/(L - 1)"));
        let a2 = total_series(&Quiver::a2(), 2, &[2, 3, 5]).unwrap();
        assert_eq!(
            a2.series.coeff(&dv(&[1, 1])).unwrap(),
            m("L*(2*L - 1)/(L - 1)^2")
        );
        assert!(matches!(
            a2.sources[&dv(&[1, 1])],
            CoefficientSource::Interpolated { .. }
        ));
    }

    #[test]
    fn single_vertex_has_one_ray() {
        let a = total_series(&Quiver::jordan(), 2, &[2, 3]).unwrap().series;
        let z = CentralCharge::from_ints(&[(3, 2)]).unwrap();
        let f = hn_factorize(&a, &z).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].series, a);
    }

    #[test]
    fn unit_series_factors_trivially() {
        let one = TorusSeries::one(2, Truncation::height(2));
        let z = CentralCharge::from_ints(&[(-1, 1), (1, 1)]).unwrap();
        for f in hn_factorize(&one, &z).unwrap() {
            assert!(f.series.terms().count() == 1);
        }
        assert!(extract_dt(&one).unwrap().iter().all(|e| e.omega.is_zero()));
    }

    #[test]
    fn a2_three_rays() {
        let a = total_series(&Quiver::a2(), 2, &[2, 3, 5]).unwrap().series;
        let z = CentralCharge::from_ints(&[(-1, 1), (1, 1)]).unwrap();
        let f = hn_factorize(&a, &z).unwrap();
        let dirs: Vec<_> = f.iter().map(|r| r.direction.clone()).collect();
        assert_eq!(dirs, vec![dv(&[1, 0]), dv(&[1, 1]), dv(&[0, 1])]);
        assert_eq!(product_of_factors(&a, &f).unwrap(), a);
    }

    #[test]
    fn degenerate_charge_rejected() {
        let a = total_series(&Quiver::a2(), 2, &[2, 3, 5]).unwrap().series;
        let r = hn_factorize(&a, &CentralCharge::standard(2));
        assert!(matches!(r, Err(Error::DegenerateCharge(_))));
    }

    #[test]
    fn extract_round_trip() {
        let b = Truncation::height(3);
        let l3 = m("L^3");
        let a = sym_of_omega(1, &b, [(&dv(&[1]), &l3)]).unwrap();
        let e = extract_dt(&a).unwrap();
        assert_eq!(e[0].omega, l3);
        assert!(e[1..].iter().all(|x| x.omega.is_zero()));
    }

    #[test]
    fn jordan_invariants() {
        let a = total_series(&Quiver::jordan(), 2, &[2, 3, 5])
            .unwrap()
            .series;
        let e = extract_dt(&a).unwrap();
        assert_eq!(e.len(), 2);
        for x in e {
            assert_eq!(x.omega, m("-L^2"));
            assert!(x.admissible);
        }
    }

    #[test]
    fn jordan_conjecture_pinned_values() {
        let r = verify_kac_conjecture(&Quiver::jordan(), 2, &[2, 3, 5]).unwrap();
        assert!(r.passed);
        let rhs = kac_side(&hua_kac(&Quiver::jordan(), 2).unwrap(), 1).unwrap();
        assert_eq!(rhs.coeff(&dv(&[1])).unwrap(), m("L^2/(L - 1)"));
        let two = BigRational::from_integer(44.into()) / BigRational::from_integer(3.into());
        assert_eq!(
            rhs.coeff(&dv(&[2])).unwrap().evaluate_at_prime(2).unwrap(),
            two
        );
        assert_eq!(
            r.total
                .coeff(&dv(&[2]))
                .unwrap()
                .evaluate_at_prime(2)
                .unwrap(),
            two
        );
    }

    #[test]
    fn stability_invariance_on_a2() {
        let a = total_series(&Quiver::a2(), 3, &[2, 3, 5]).unwrap().series;
        let z1 = CentralCharge::from_ints(&[(-1, 1), (1, 1)]).unwrap();
        let z2 = CentralCharge::from_ints(&[(1, 1), (-1, 1)]).unwrap();
        let r = stability_invariance_check(&a, &z1, &z2).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.ray_counts, [5, 5]);
    }

    #[test]
    fn report_is_deterministic_json() {
        let a = verify_kac_conjecture(&Quiver::a2(), 2, &[2, 3, 5]).unwrap();
        let b = verify_kac_conjecture(&Quiver::a2(), 2, &[2, 3, 5]).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let back: DtReport = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
    }
}
