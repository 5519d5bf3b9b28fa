//! Built-in invariant suites: a compact battery over every subsystem,
//! printing one line per suite.

use anyhow::{ensure, Result};

use charges::conglomerate::{
    check_conglomerability, disintegrate, solve_companion, ConglomerabilityInstance,
    DisintegrationInstance,
};
use charges::convex::{decompose, normalize_at_min, reconstruct, PiecewiseLinearConvex};
use charges::integrate::integral;
use charges::lp::{solve_feasibility, FeasibilityOutcome, FeasibilitySystem};
use charges::rational::Rational;
use charges::skorohod::{pushforward_measure, verify_pushforward, Enumeration};
use charges::{GroundSet, MeasureStructure, PointMap, RandomQuantity};

fn rint(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

/// A tiny deterministic integer stream (xorshift64*) for the batteries;
/// statistical quality is irrelevant here, reproducibility is not.
struct Stream(u64);

impl Stream {
    fn new(seed: u64) -> Self {
        Stream(seed.max(1))
    }

    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next() % (hi - lo + 1) as u64) as i64
    }
}

pub fn run() -> Result<u8> {
    dichotomy()?;
    layer_cake()?;
    companions()?;
    mixtures()?;
    convex_round_trip()?;
    universal_map()?;
    println!("selftest: all suites passed");
    Ok(0)
}

fn dichotomy() -> Result<()> {
    let mut s = Stream::new(101);
    for _ in 0..100 {
        let d = s.int(1, 4) as usize;
        let n = s.int(1, 6) as usize;
        let a: Vec<Vec<Rational>> = (0..d)
            .map(|_| (0..n).map(|_| rint(s.int(-9, 9))).collect())
            .collect();
        let b: Vec<Rational> = (0..d).map(|_| rint(s.int(-9, 9))).collect();
        let sys = FeasibilitySystem::new(a, b)?;
        let report = solve_feasibility(&sys);
        ensure!(sys.verify(&report.outcome), "witness failed re-verification");
        let swapped = match &report.outcome {
            FeasibilityOutcome::Feasible(x) => FeasibilityOutcome::Infeasible(x.clone()),
            FeasibilityOutcome::Infeasible(y) => FeasibilityOutcome::Feasible(y.clone()),
        };
        ensure!(!sys.verify(&swapped), "branches must be exclusive");
    }
    println!("selftest: feasibility dichotomy — 100 systems, all witnesses verified");
    Ok(())
}

fn layer_cake() -> Result<()> {
    let mut s = Stream::new(102);
    for _ in 0..100 {
        let n = s.int(1, 5) as usize;
        let g = GroundSet::new((0..n).map(|i| format!("w{i}")))?;
        let masses: Vec<Rational> = (0..n).map(|_| rat(s.int(0, 6), 3)).collect();
        let ms = MeasureStructure::from_atom_masses(&g, &masses)?;
        let x = RandomQuantity::new(
            g.clone(),
            (0..n).map(|_| rat(s.int(-8, 8), 2)).collect(),
        )?;
        let direct: Rational = (0..n)
            .map(|i| x.value(i) * ms.value(&g.singleton(i)).unwrap())
            .sum();
        ensure!(integral(&x, &ms)? == direct, "layer cake mismatch");
    }
    println!("selftest: layer-cake integrals — 100 structures, exact agreement");
    Ok(())
}

fn companions() -> Result<()> {
    let omega = GroundSet::new(["o1", "o2"])?;
    let s = GroundSet::new(["s1", "s2"])?;
    let m = MeasureStructure::from_atom_masses(&omega, &[rat(1, 2), rat(1, 2)])?;
    let x = PointMap::from_labels(omega, s.clone(), &[("o1", "s1"), ("o2", "s2")])?;
    let family = vec![
        RandomQuantity::indicator(&s.subset(["s1"])?),
        RandomQuantity::indicator(&s.subset(["s2"])?),
    ];
    let omega_prime = GroundSet::new(["p1", "p2", "p3"])?;
    let x_prime = PointMap::from_labels(
        omega_prime,
        s,
        &[("p1", "s1"), ("p2", "s2"), ("p3", "s2")],
    )?;
    let sol = solve_companion(&m, &x, &family, &x_prime)?;
    let minimal = sol.minimal.expect("feasible worked instance");
    for h in &family {
        let lhs = integral(&h.compose(&x)?, &m)?;
        ensure!(integral(&h.compose(&x_prime)?, &minimal)? == lhs);
    }
    // a violating instance produces a verifying certificate
    let inst = ConglomerabilityInstance::new(
        vec!["h1".into()],
        GroundSet::new(["w0", "w1"])?,
        vec![vec![rint(1), rint(2)]],
        vec![rint(-1)],
    )?;
    let report = check_conglomerability(&inst);
    let cert = report.outcome.certificate().expect("infeasible");
    ensure!(inst.apply_phi(cert) < rint(0));
    ensure!(inst.apply_t(cert).iter().all(|v| v >= &rint(0)));
    println!("selftest: companions — worked instance and certificate verified");
    Ok(())
}

fn mixtures() -> Result<()> {
    let g = GroundSet::new(["w1", "w2"])?;
    let m = MeasureStructure::from_atom_masses(&g, &[rat(1, 2), rat(1, 2)])?;
    let q1 = MeasureStructure::from_atom_masses(&g, &[rint(1), rint(0)])?;
    let q2 = MeasureStructure::from_atom_masses(&g, &[rint(0), rint(1)])?;
    let inst = DisintegrationInstance::new(
        m.lambda().clone(),
        vec!["t1".into(), "t2".into()],
        vec![q1.lambda().clone(), q2.lambda().clone()],
    )?;
    let report = disintegrate(&inst);
    ensure!(
        report.outcome == FeasibilityOutcome::Feasible(vec![rat(1, 2), rat(1, 2)]),
        "uniform mixture expected"
    );
    println!("selftest: disintegration — uniform marginal mixes evenly");
    Ok(())
}

fn convex_round_trip() -> Result<()> {
    let mut s = Stream::new(103);
    for _ in 0..30 {
        let k = s.int(1, 6) as usize;
        let mut bps = Vec::new();
        let mut cursor = rat(s.int(-20, -10), 2);
        for _ in 0..k {
            cursor += rat(s.int(1, 6), 2);
            bps.push(cursor.clone());
        }
        let pivot = s.int(0, k as i64) as usize;
        let jumps: Vec<Rational> = (0..k).map(|_| rat(s.int(1, 5), 2)).collect();
        let offset: Rational = jumps.iter().take(pivot).cloned().sum();
        let mut acc = Rational::from_integer(0.into());
        let mut slopes = vec![-offset.clone()];
        for j in &jumps {
            acc += j;
            slopes.push(&acc - &offset);
        }
        let phi = PiecewiseLinearConvex::new(bps, slopes, (rint(0), rint(0)))?;
        let (x0, hat) = normalize_at_min(&phi)?;
        let d = decompose(&phi)?;
        for v in -30..30 {
            let v = rat(v, 1);
            ensure!(
                reconstruct(&x0, &d.nu, &x0, &hat.eval(&x0), &v) == hat.eval(&v),
                "round trip must be exact"
            );
        }
    }
    println!("selftest: convex decomposition — 30 exact round trips");
    Ok(())
}

fn universal_map() -> Result<()> {
    let mut s = Stream::new(104);
    for _ in 0..10 {
        let support = s.int(1, 12) as usize;
        let labels: Vec<String> = (0..support).map(|i| format!("s{i}")).collect();
        let raw: Vec<Rational> = (0..support).map(|_| rint(s.int(1, 9))).collect();
        let total: Rational = raw.iter().cloned().sum();
        let law: std::collections::BTreeMap<String, Rational> = labels
            .iter()
            .cloned()
            .zip(raw.into_iter().map(|r| r / &total))
            .collect();
        let e = Enumeration::new(labels.clone())?;
        let im = pushforward_measure(&law, &e)?;
        let tests: Vec<std::collections::BTreeMap<String, Rational>> = (0..5)
            .map(|_| {
                labels
                    .iter()
                    .cloned()
                    .map(|l| (l, rat(s.int(-9, 9), 2)))
                    .collect()
            })
            .collect();
        ensure!(verify_pushforward(&law, &e, &im, &tests)?);
    }
    println!("selftest: universal map — 10 laws, exact pushforwards");
    Ok(())
}
