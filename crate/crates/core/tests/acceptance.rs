//! The ten acceptance criteria, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nonminimal::{
    build_l, coupled_map_g, explicit_m0, formal_solutions, gevrey_estimate, lambda_map_check, map_residual,
    numeric_monodromy, rat, residue_analysis, self_map_probe, solve_psi, tangency_residual,
    termination_detect, AdmissibleOde, GaussRat, Hypersurface, RealStructure, Result, Scalar, Series1, Sign,
};

type Q = GaussRat;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn family(m: i64, beta: i64, n: i64) -> Result<AdmissibleOde<Q>> {
    AdmissibleOde::family(m, &rat(beta, 1), n)
}

fn hypersurface(m: i64, beta: i64, nx: usize, ny: usize) -> Result<Hypersurface<Q>> {
    solve_psi(&family(m, beta, ny as i64)?, Sign::Positive, nx, ny)?.rho()
}

const GRID: [(i64, i64); 6] = [(2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (3, 2)];

fn roundtrip() -> Result<Outcome> {
    let mut slowest = Duration::ZERO;
    for (m, beta) in GRID {
        let start = Instant::now();
        let ode = family(m, beta, 24)?;
        let back = solve_psi(&ode, Sign::Positive, 8, 24)?.extract_pq()?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        if let Some((s, mm)) = back.mismatch(&ode) {
            return outcome(
                false,
                format!("m={m} β={beta}: {s} differs at degree {}", mm.degree),
            );
        }
        if back.trunc() < 24 {
            return outcome(
                false,
                format!("m={m} β={beta}: only verified to degree {}", back.trunc()),
            );
        }
        if elapsed >= Duration::from_secs(10) {
            return outcome(false, format!("m={m} β={beta}: took {elapsed:?}"));
        }
    }
    outcome(true, format!("6 members exact on (8, 24), slowest {slowest:.2?}"))
}

fn reality() -> Result<Outcome> {
    for (m, beta) in GRID {
        let ode = family(m, beta, 24)?;
        let fam = solve_psi(&ode, Sign::Positive, 8, 24)?;
        if let Some(w) = fam.real_structure_witness()? {
            return outcome(
                false,
                format!(
                    "m={m} β={beta}: dual ≠ conjugate at x^{} η^{}",
                    w.x_degree, w.eta_degree
                ),
            );
        }
        let realty = fam.rho()?.realty_residual()?;
        if let Some((j, k, _)) = realty.first_nonzero() {
            return outcome(false, format!("m={m} β={beta}: realty residual at x^{j} η^{k}"));
        }
        let data = match fam.extract_pq()?.real_structure() {
            RealStructure::Real(d) => d,
            RealStructure::NotReal { series, degree, .. } => {
                return outcome(
                    false,
                    format!("m={m} β={beta}: {series} not real at degree {degree}"),
                );
            }
        };
        // oracle: a ≡ 1, b = β w^{2m−2}
        let n = data.a().trunc();
        let b = Series1::monomial(Q::from_i64(beta), 2 * m - 2, n);
        if !data.a().agrees_with(&Series1::one(n)) || !data.b().agrees_with(&b) {
            return outcome(false, format!("m={m} β={beta}: recovered (a, b) differ"));
        }
    }
    outcome(
        true,
        "dual = conjugate, realty ≡ 0, (a, b) = (1, βw^{2m−2}) on all 6 members",
    )
}

fn pullback() -> Result<Outcome> {
    let e0 = family(2, 0, 40)?;
    let mut orders = vec![];
    for beta in [1, 2, 3] {
        let map = formal_solutions::<Q>(2, &rat(beta, 1), 40)?.chi_tau()?;
        let back = e0.pullback(&map, 2)?;
        if let Some((s, mm)) = back.mismatch(&family(2, beta, 40)?) {
            return outcome(false, format!("β={beta}: {s} differs at degree {}", mm.degree));
        }
        if back.trunc() < 20 {
            return outcome(false, format!("β={beta}: guaranteed order {} < 20", back.trunc()));
        }
        orders.push(back.trunc());
    }
    outcome(
        true,
        format!("pullback of E²_0 equals E²_β for β=1,2,3 to orders {orders:?}"),
    )
}

fn hypersurface_map() -> Result<Outcome> {
    let map = formal_solutions::<Q>(2, &rat(1, 1), 40)?.chi_tau()?;
    let r = map_residual(&hypersurface(2, 1, 8, 24)?, &hypersurface(2, 0, 8, 24)?, &map)?;
    if let Some((j, k, _)) = r.first_nonzero() {
        return outcome(false, format!("map residual nonzero at x^{j} η^{k}"));
    }
    let g = coupled_map_g(&map, 2)?;
    let conj = map.conj();
    if !g.f().agrees_with(conj.f()) || !g.g().agrees_with(conj.g()) {
        return outcome(false, "coupled map differs from the conjugate of (χ, τ)");
    }
    outcome(
        true,
        format!(
            "residual ≡ 0 on {:?}; G = conj(χ, τ) to degree {}",
            r.rect(),
            g.f().trunc().min(g.g().trunc())
        ),
    )
}

fn monodromy() -> Result<Outcome> {
    for m in [2, 3] {
        for b in -3..=6 {
            // oracle: β = l(l−m+1) for an integer l
            let resonant = (-20..=20).any(|l: i64| l * (l - m + 1) == b);
            if residue_analysis(m, &rat(b, 1))?.trivial != resonant {
                return outcome(false, format!("m={m} β={b}: triviality misclassified"));
            }
        }
    }
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for b in [0, 1, 2] {
        let start = Instant::now();
        let rep = numeric_monodromy(2, &rat(b, 1), 1.0, 1e-10)?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        let dev = rep.numeric.expect("numeric part").deviation;
        worst = worst.max(dev);
        if dev >= 1e-6 || elapsed >= Duration::from_secs(5) {
            return outcome(false, format!("β={b}: deviation {dev:e} in {elapsed:?}"));
        }
    }
    outcome(
        true,
        format!("classification matches on 20 cases; max deviation {worst:.1e}, slowest {slowest:.2?}"),
    )
}

fn tangency() -> Result<Outcome> {
    let fields =
        [0, 1].map(|b| formal_solutions::<Q>(2, &rat(b, 1), 40).and_then(|p| build_l(&p.chi_tau()?, 2)));
    let surfaces = [hypersurface(2, 0, 8, 24)?, hypersurface(2, 1, 8, 24)?];
    for (i, field) in fields.iter().enumerate() {
        let field = field.as_ref().map_err(Clone::clone)?;
        for (j, h) in surfaces.iter().enumerate() {
            let r = tangency_residual(field, h)?;
            match (i == j, r.first_nonzero()) {
                (true, Some((x, y, _))) => {
                    return outcome(false, format!("β={i}: residual nonzero at x^{x} η^{y}"));
                }
                (false, None) => return outcome(false, format!("field β={i} on M_{j}: no witness")),
                _ => {}
            }
        }
    }
    let w = tangency_residual(fields[1].as_ref().map_err(Clone::clone)?, &surfaces[0])?
        .first_nonzero()
        .expect("checked above");
    outcome(
        true,
        format!(
            "L tangent for β=0,1; mismatched witness at x^{} η^{} = {}",
            w.0, w.1, w.2
        ),
    )
}

fn model() -> Result<Outcome> {
    let model = explicit_m0::<Q>(2, 8, 24)?;
    let segre = hypersurface(2, 0, 8, 24)?;
    if let Some(mm) = model.rho().mismatch(segre.rho()) {
        return outcome(false, format!("differ at x^{} η^{}", mm.x_degree, mm.eta_degree));
    }
    // oracle: x² coefficient iη² − η³
    let x2 = model.rho().row(2);
    let expected = Series1::from_coeffs(vec![Q::zero(), Q::zero(), Q::i(), Q::from_i64(-1)], 24);
    if !x2.agrees_with(&expected) {
        return outcome(false, "x² coefficient is not iη² − η³");
    }
    outcome(
        true,
        "closed form = Segre hypersurface of E²_0 on (8, 24), x² row iη² − η³",
    )
}

fn divergence() -> Result<Outcome> {
    for b in [0, 2, 6, 12, 20, 30, 1, 3, 5, 7] {
        let f = formal_solutions::<Q>(2, &rat(b, 1), 60)?.f;
        let expected = [0, 2, 6, 12, 20, 30].contains(&b);
        if termination_detect(&f, nonminimal::growth::DEFAULT_TAIL).terminated() != expected {
            return outcome(false, format!("β={b}: termination misdetected"));
        }
    }
    let f = formal_solutions::<Q>(2, &rat(1, 1), 200)?.f;
    let s = gevrey_estimate(&f, (32, 180))?.gevrey;
    outcome(
        (0.8..=1.2).contains(&s),
        format!("termination exact on 10 cases; Gevrey order of f (β=1, N=200) = {s:.4}"),
    )
}

fn probe() -> Result<Outcome> {
    let rep = self_map_probe(&family(2, 0, 20)?, 12)?;
    let ranks: Vec<usize> = rep.levels.iter().map(|l| l.rank).collect();
    outcome(
        rep.levels.len() == 12 && rep.is_rigid() && rep.is_identity(),
        format!("ranks {ranks:?}, identity = {}", rep.is_identity()),
    )
}

fn lambda() -> Result<Outcome> {
    for m in [2, 3, 4] {
        let check = lambda_map_check::<Q>(m, 40)?;
        if let Some((s, mm)) = check.witness {
            return outcome(false, format!("m={m}: {s} differs at degree {}", mm.degree));
        }
    }
    outcome(
        true,
        "pullback of Z'' = 0 under W = E(w) is E^m_0 for m = 2, 3, 4",
    )
}

type Criterion = fn() -> Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("round-trip exactness", roundtrip),
        ("reality triple-check", reality),
        ("gauge pullback E^m_0 -> E^m_beta", pullback),
        ("hypersurface map and coupled map", hypersurface_map),
        ("monodromy", monodromy),
        ("tangency of L", tangency),
        ("explicit model M^2_0", model),
        ("divergence diagnostics", divergence),
        ("uniqueness probe", probe),
        ("lambda-map identity", lambda),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict} {name}: {detail} [{:.2?}]",
            i + 1,
            start.elapsed()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
