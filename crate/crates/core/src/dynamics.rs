//! Weighted polynomial averages along orbits of finite dynamical systems.
//!
//! Two systems are supported, both acting on `Z/mZ` so that every orbit point
//! is computed exactly:
//!
//! * the cyclic shift `T j = j + 1 mod J`;
//! * the rotation `T x = x + p/q mod 1` restricted to the points `a/q`, stored
//!   as the numerator `a`.
//!
//! Irrational rotations are approached through continued-fraction convergents
//! (see [`convergents`]).

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::maximal::LacunaryLadder;
use crate::poly::IntPolynomial;
use crate::rng::CounterRng;
use crate::spectral::PeriodicSignal;
use crate::weights::{WeightKind, WeightTable};

/// Cap on trigonometric-polynomial observables.
pub const MAX_MODES: usize = 64;

/// Largest modulus for which the orbit-coverage check allocates a visit map.
pub const MAX_ORBIT_CHECK: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DynamicalSystem {
    CyclicShift { period: u64 },
    RationalRotation { p: u64, q: u64 },
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl DynamicalSystem {
    pub fn cyclic(period: u64) -> Result<Self> {
        if period == 0 {
            return Err(LabError::Domain("shift period must be at least 1".into()));
        }
        Ok(DynamicalSystem::CyclicShift { period })
    }

    /// Rotation by `p/q`; `p` is reduced mod `q`.
    pub fn rotation(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(LabError::Domain("rotation denominator must be positive".into()));
        }
        Ok(DynamicalSystem::RationalRotation { p: p % q, q })
    }

    /// Size of the state space.
    pub fn modulus(&self) -> u64 {
        match *self {
            DynamicalSystem::CyclicShift { period } => period,
            DynamicalSystem::RationalRotation { q, .. } => q,
        }
    }

    fn step(&self) -> u64 {
        match *self {
            DynamicalSystem::CyclicShift { period } => 1 % period,
            DynamicalSystem::RationalRotation { p, .. } => p,
        }
    }

    pub fn validate_state(&self, x: u64) -> Result<()> {
        if x >= self.modulus() {
            return Err(LabError::InvalidState(format!(
                "state {x} outside 0..{}",
                self.modulus()
            )));
        }
        Ok(())
    }

    /// `T x`.
    pub fn apply(&self, x: u64) -> u64 {
        ((x as u128 + self.step() as u128) % self.modulus() as u128) as u64
    }

    /// `T^{power · P(n)} x`, exact for every argument.
    #[inline]
    pub fn orbit_point(&self, x: u64, poly: &IntPolynomial, n: u64, power: i64) -> u64 {
        let m = self.modulus();
        let pn = poly.eval_mod_unchecked(n, m) as u128;
        let stride = ((power as i128 * self.step() as i128).rem_euclid(m as i128)) as u128;
        ((x as u128 + pn * stride % m as u128) % m as u128) as u64
    }

    /// `T` pushes the counting measure forward to itself, i.e. it permutes the states.
    pub fn is_measure_preserving(&self) -> Result<bool> {
        let m = self.modulus();
        if m > MAX_ORBIT_CHECK {
            return Err(LabError::Capacity(format!("modulus {m} too large to enumerate")));
        }
        let mut hit = vec![false; m as usize];
        for x in 0..m {
            let y = self.apply(x) as usize;
            if hit[y] {
                return Ok(false);
            }
            hit[y] = true;
        }
        Ok(true)
    }

    /// The orbit of `x` visits every state.
    pub fn orbit_covers_all(&self, x: u64) -> Result<bool> {
        self.validate_state(x)?;
        let m = self.modulus();
        if m > MAX_ORBIT_CHECK {
            return Err(LabError::Capacity(format!("modulus {m} too large to enumerate")));
        }
        let mut seen = vec![false; m as usize];
        let mut y = x;
        let mut count = 0u64;
        while !seen[y as usize] {
            seen[y as usize] = true;
            count += 1;
            y = self.apply(y);
        }
        Ok(count == m)
    }

    pub fn is_ergodic(&self) -> bool {
        gcd(self.step(), self.modulus()) == 1
    }
}

impl std::fmt::Display for DynamicalSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DynamicalSystem::CyclicShift { period } => write!(f, "cyclic:{period}"),
            DynamicalSystem::RationalRotation { p, q } => write!(f, "rotation:{p}/{q}"),
        }
    }
}

impl std::str::FromStr for DynamicalSystem {
    type Err = LabError;

    /// `cyclic:J` or `rotation:p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || LabError::Parse(format!("bad system `{s}` (expected cyclic:J or rotation:p/q)"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "cyclic" => Self::cyclic(rest.trim().parse().map_err(|_| bad())?),
            "rotation" => {
                let (p, q) = rest.split_once('/').ok_or_else(bad)?;
                Self::rotation(p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?)
            }
            _ => Err(bad()),
        }
    }
}

/// `x ↦ Σ_m c_m e^{2πi m x}` evaluated at the points `a/q`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    modes: Vec<(i64, Complex64)>,
}

impl TrigPolynomial {
    pub fn new(modes: Vec<(i64, Complex64)>) -> Result<Self> {
        if modes.is_empty() || modes.len() > MAX_MODES {
            return Err(LabError::Domain(format!(
                "trigonometric polynomial needs 1..={MAX_MODES} modes, got {}",
                modes.len()
            )));
        }
        Ok(Self { modes })
    }

    pub fn modes(&self) -> &[(i64, Complex64)] {
        &self.modes
    }

    /// Value at `a / q`; the phase `m·a mod q` is reduced exactly.
    pub fn eval(&self, a: u64, q: u64) -> Complex64 {
        self.modes
            .iter()
            .map(|&(m, c)| {
                let t = (m as i128 * a as i128).rem_euclid(q as i128) as f64;
                let (s, co) = (TAU * t / q as f64).sin_cos();
                c * Complex64::new(co, s)
            })
            .sum()
    }

    /// `Σ |c_m|`, an upper bound for the sup norm.
    pub fn coefficient_l1(&self) -> f64 {
        self.modes.iter().map(|(_, c)| c.norm()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// Values on the `m` states directly; the period must equal the modulus.
    Periodic(PeriodicSignal),
    Trig(TrigPolynomial),
}

impl Observable {
    pub fn validate(&self, system: &DynamicalSystem) -> Result<()> {
        match self {
            Observable::Periodic(s) if s.period() as u64 != system.modulus() => Err(LabError::Shape(format!(
                "observable period {} does not match the system size {}",
                s.period(),
                system.modulus()
            ))),
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, point: u64, modulus: u64) -> Complex64 {
        match self {
            Observable::Periodic(s) => s.get(point as usize),
            Observable::Trig(t) => t.eval(point, modulus),
        }
    }

    /// Values at all `m` states.
    pub fn tabulate(&self, system: &DynamicalSystem) -> Result<PeriodicSignal> {
        self.validate(system)?;
        let m = system.modulus();
        if m > MAX_ORBIT_CHECK {
            return Err(LabError::Capacity(format!("modulus {m} too large to tabulate")));
        }
        PeriodicSignal::new((0..m).map(|x| self.eval(x, m)).collect())
    }

    pub fn sup_norm(&self, system: &DynamicalSystem) -> Result<f64> {
        match self {
            Observable::Periodic(s) => Ok(s.sup_norm()),
            Observable::Trig(_) if system.modulus() <= MAX_ORBIT_CHECK => {
                Ok(self.tabulate(system)?.sup_norm())
            }
            Observable::Trig(t) => Ok(t.coefficient_l1()),
        }
    }

    /// `self − other` on the states of `system`.
    pub fn difference(&self, other: &Observable, system: &DynamicalSystem) -> Result<Observable> {
        if let (Observable::Trig(a), Observable::Trig(b)) = (self, other) {
            let mut modes = a.modes.clone();
            modes.extend(b.modes.iter().map(|&(m, c)| (m, -c)));
            if modes.len() <= MAX_MODES {
                return Ok(Observable::Trig(TrigPolynomial { modes }));
            }
        }
        let a = self.tabulate(system)?;
        let b = other.tabulate(system)?;
        Ok(Observable::Periodic(PeriodicSignal::new(
            a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect(),
        )?))
    }
}

fn check_inputs(
    system: &DynamicalSystem,
    observables: &[&Observable],
    table: &WeightTable,
    n: u64,
    x: u64,
) -> Result<()> {
    table.check_range(n)?;
    system.validate_state(x)?;
    observables.iter().try_for_each(|o| o.validate(system))
}

/// `(1/N) Σ_{n ≤ N} ν(n) f(T^{P(n)} x) g(T^{Q(n)} x)`.
#[allow(clippy::too_many_arguments)]
pub fn bilinear_average(
    system: &DynamicalSystem,
    f: &Observable,
    g: &Observable,
    p: &IntPolynomial,
    q: &IntPolynomial,
    table: &WeightTable,
    n: u64,
    x: u64,
) -> Result<Complex64> {
    check_inputs(system, &[f, g], table, n, x)?;
    let m = system.modulus();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        let w = table.get(k);
        if w == 0 {
            continue;
        }
        let fp = f.eval(system.orbit_point(x, p, k, 1), m);
        let gq = g.eval(system.orbit_point(x, q, k, 1), m);
        acc += fp * gq * w as f64;
    }
    Ok(acc / n as f64)
}

/// One factor `f_i(T_i^{P_i(n)} x)` of a multilinear average, with `T_i = T^power`.
#[derive(Debug, Clone)]
pub struct MultilinearTerm {
    pub observable: Observable,
    pub poly: IntPolynomial,
    pub power: i64,
}

/// `(1/N) Σ_{n ≤ N} ν(n) Π_i f_i(T^{power_i · P_i(n)} x)`.
pub fn multilinear_average(
    system: &DynamicalSystem,
    terms: &[MultilinearTerm],
    table: &WeightTable,
    n: u64,
    x: u64,
) -> Result<Complex64> {
    if terms.is_empty() {
        return Err(LabError::Domain("need at least one observable".into()));
    }
    let obs: Vec<&Observable> = terms.iter().map(|t| &t.observable).collect();
    check_inputs(system, &obs, table, n, x)?;
    let m = system.modulus();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        let w = table.get(k);
        if w == 0 {
            continue;
        }
        let mut prod = Complex64::new(1.0, 0.0);
        for (i, t) in terms.iter().enumerate() {
            let v = t.observable.eval(system.orbit_point(x, &t.poly, k, t.power), m);
            prod = if i == 0 { v } else { prod * v };
        }
        acc += prod * w as f64;
    }
    Ok(acc / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub n: u64,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AverageTrace {
    pub start: u64,
    pub weight: Option<WeightKind>,
    pub p: IntPolynomial,
    pub q: IntPolynomial,
    pub rows: Vec<TraceRow>,
}

/// `A_N(x)` along the ladder `N ∈ I_ρ`, `N ≤ table.limit()`, with one running sum.
#[allow(clippy::too_many_arguments)]
pub fn convergence_trace(
    system: &DynamicalSystem,
    f: &Observable,
    g: &Observable,
    p: &IntPolynomial,
    q: &IntPolynomial,
    table: &WeightTable,
    rho: f64,
    x: u64,
) -> Result<AverageTrace> {
    let ladder = LacunaryLadder::new(rho, table.limit())?;
    check_inputs(system, &[f, g], table, 1, x)?;
    let m = system.modulus();
    let mut rows = Vec::with_capacity(ladder.members().len());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut k = 0u64;
    for &target in ladder.members() {
        while k < target {
            k += 1;
            let w = table.get(k);
            if w != 0 {
                let fp = f.eval(system.orbit_point(x, p, k, 1), m);
                let gq = g.eval(system.orbit_point(x, q, k, 1), m);
                acc += fp * gq * w as f64;
            }
        }
        rows.push(TraceRow { n: target, value: acc / target as f64 });
    }
    Ok(AverageTrace { start: x, weight: table.kind(), p: p.clone(), q: q.clone(), rows })
}

/// Both sides of `|A_N(f − f₁, g − g₁)(x)| ≤ (avg |Δf|²(T^{P(n)}x))^{1/2} (avg |Δg|²(T^{Q(n)}x))^{1/2}`.
#[allow(clippy::too_many_arguments)]
pub fn cauchy_schwarz_split(
    system: &DynamicalSystem,
    f: &Observable,
    f1: &Observable,
    g: &Observable,
    g1: &Observable,
    p: &IntPolynomial,
    q: &IntPolynomial,
    table: &WeightTable,
    n: u64,
    x: u64,
) -> Result<(f64, f64)> {
    let df = f.difference(f1, system)?;
    let dg = g.difference(g1, system)?;
    let lhs = bilinear_average(system, &df, &dg, p, q, table, n, x)?.norm();
    let m = system.modulus();
    let (mut sf, mut sg) = (0.0, 0.0);
    for k in 1..=n {
        sf += df.eval(system.orbit_point(x, p, k, 1), m).norm_sqr();
        sg += dg.eval(system.orbit_point(x, q, k, 1), m).norm_sqr();
    }
    Ok((lhs, (sf / n as f64).sqrt() * (sg / n as f64).sqrt()))
}

/// Start points: `0` followed by `count − 1` seeded uniform states.
pub fn sample_starts(system: &DynamicalSystem, count: usize, seed: u64) -> Vec<u64> {
    let mut rng = CounterRng::stream(seed, 0x5354_4152_5453);
    (0..count)
        .map(|i| if i == 0 { 0 } else { rng.next_below(system.modulus()) })
        .collect()
}

/// Continued-fraction convergents `p/q` of `x ∈ [0, 1)` with `q ≤ max_den`.
pub fn convergents(x: f64, max_den: u64) -> Result<Vec<(u64, u64)>> {
    if !(0.0..1.0).contains(&x) {
        return Err(LabError::Domain(format!("{x} is not in [0, 1)")));
    }
    let (mut h0, mut h1) = (0u128, 1u128);
    let (mut k0, mut k1) = (1u128, 0u128);
    let mut rest = x;
    let mut out = Vec::new();
    // x = a0 + 1/(a1 + …) with a0 = 0.
    let mut a = 0u128;
    for _ in 0..64 {
        let h = a * h1 + h0;
        let k = a * k1 + k0;
        if k > max_den as u128 {
            break;
        }
        out.push((h as u64, k as u64));
        (h0, h1, k0, k1) = (h1, h, k1, k);
        if rest < 1e-15 {
            break;
        }
        let inv = 1.0 / rest;
        a = inv.floor() as u128;
        rest = inv - inv.floor();
    }
    Ok(out)
}
