//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the console.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use coherent2d::dynamics::{evolve_closed_form, evolve_spectral, phase_aligned_max_error, signed_area, trace_orbit};
use coherent2d::expansion::{build_table, coeff_elliptic, coeff_quadrature_auto, poisson_pmf};
use coherent2d::observables::{compute_report, marginals, partial_moment_identities};
use coherent2d::specialfn::verify_laguerre_integral;
use coherent2d::states::{classical_center, Chirality, Grid2D, ModeIndex, PacketParams};

const SWEEP: [f64; 6] = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn params(xi0: f64, eta0: f64, chirality: Chirality) -> PacketParams {
    PacketParams::new(xi0, eta0).unwrap().with_chirality(chirality)
}

fn coefficient_oracle() -> Outcome {
    let mut re = 0.0f64;
    let mut im = 0.0f64;
    let mut count = 0;
    for (x, e) in [(1.0, 1.0), (2.0, 2.0), (1.5, 0.5), (1.0, 0.0), (0.3, 2.1)] {
        let p = params(x, e, Chirality::Retarded);
        for mode in ModeIndex::up_to(16) {
            let q = coeff_quadrature_auto(&p, mode).unwrap();
            re = re.max((coeff_elliptic(&p, mode) - q.re).abs());
            im = im.max(q.im.abs());
            count += 1;
        }
    }
    outcome(
        re <= 1e-10 && im <= 1e-12,
        format!("{count} coefficients, max |analytic - quadrature| = {re:.3e} (tol 1e-10), max |Im| = {im:.3e} (tol 1e-12)"),
    )
}

fn circular_support() -> Outcome {
    let mut worst = 0.0f64;
    for x in [0.5, 1.0, 2.0] {
        for chirality in [Chirality::Retarded, Chirality::Advanced] {
            let p = params(x, x, chirality);
            for mode in ModeIndex::up_to(16) {
                let allowed = mode.n_r == 0 && chirality.sign() * mode.m as f64 >= 0.0;
                if !allowed {
                    worst = worst.max(coeff_quadrature_auto(&p, mode).unwrap().norm());
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("max off-support |C| = {worst:.3e} (tol 1e-12)"))
}

fn normalization() -> Outcome {
    let mut deficit = 0.0f64;
    let mut poisson = 0.0f64;
    for x in SWEEP {
        for e in SWEEP {
            let p = params(x, e, Chirality::Retarded);
            let table = build_table(&p, None).unwrap();
            deficit = deficit.max(1.0 - table.sum_squares());
            let p_n = marginals(&table).p_n;
            for n in 0..=20 {
                let got = p_n.get(&n).copied().unwrap_or(0.0);
                poisson = poisson.max((got - poisson_pmf(p.mean_principal(), n)).abs());
            }
        }
    }
    outcome(
        deficit <= 1e-12 && poisson <= 1e-10,
        format!("max 1 - sum|C|^2 = {deficit:.3e} (tol 1e-12), max |P(N) - Poisson| = {poisson:.3e} (tol 1e-10)"),
    )
}

fn moment_identities() -> Outcome {
    let mut worst = 0.0f64;
    let mut circular = 0.0f64;
    for x in SWEEP {
        for e in SWEEP {
            let p = params(x, e, Chirality::Retarded);
            let table = build_table(&p, None).unwrap();
            let r = compute_report(&table).unwrap();
            let ids = partial_moment_identities(&table).unwrap();
            let (a2, b2) = (p.a() * p.a(), p.b() * p.b());
            for d in [
                r.mean_m - x * e,
                r.mean_energy - (0.5 * (x * x + e * e) + 1.0),
                ids.lhs18 - a2,
                ids.lhs19 - b2,
            ] {
                worst = worst.max(d.abs());
            }
            if x == e {
                circular = circular.max((r.mean_m - x * x).abs()).max((r.mean_energy - r.mean_m - 1.0).abs());
            }
        }
    }
    outcome(
        worst <= 1e-9 && circular <= 1e-9,
        format!("max identity residual = {worst:.3e}, circular = {circular:.3e} (tol 1e-9)"),
    )
}

fn laguerre_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut zeros = true;
    for n in 0..=6 {
        for mu in 0..=4 {
            for lambda in 0..=6 {
                let v = verify_laguerre_integral(n, mu, lambda).unwrap();
                let scale = v.closed_form.abs().max(1.0);
                worst = worst.max((v.closed_form - v.quadrature).abs() / scale);
                if lambda == mu && n >= 1 {
                    zeros &= v.closed_form == 0.0 && v.quadrature.abs() <= 1e-10;
                }
            }
        }
    }
    outcome(
        worst <= 1e-10 && zeros,
        format!("max relative residual = {worst:.3e} (tol 1e-10), vanishing at lambda = mu, n >= 1: {zeros}"),
    )
}

fn classical_correspondence() -> Outcome {
    let times: Vec<f64> = (0..64).map(|k| 2.0 * PI * k as f64 / 64.0).collect();
    let (mut centroid, mut spread, mut ellipse, mut asymmetry) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut flips = true;
    for (x, e) in [(1.5, 0.5), (2.0, 1.0), (1.0, 1.0), (0.7, 2.4)] {
        let mut areas = Vec::new();
        for chirality in [Chirality::Retarded, Chirality::Advanced] {
            let p = params(x, e, chirality);
            let samples = trace_orbit(&p, &times, &Grid2D::for_params(&p)).unwrap();
            for s in &samples {
                let (cx, cy) = classical_center(&p, s.t);
                centroid = centroid.max((s.centroid_xi - cx).abs()).max((s.centroid_eta - cy).abs());
                spread = spread.max((s.var_xi - 0.5).abs()).max((s.var_eta - 0.5).abs());
                let r = (s.centroid_xi / x).powi(2) + (s.centroid_eta / e).powi(2) - 1.0;
                ellipse = ellipse.max(r.abs());
            }
            areas.push(signed_area(&samples));
        }
        flips &= areas[0] > 0.0 && areas[1] < 0.0;
        asymmetry = asymmetry.max((areas[0] + areas[1]).abs() / areas[0].abs());
    }
    outcome(
        centroid <= 1e-6 && spread <= 1e-6 && ellipse <= 1e-6 && flips && asymmetry <= 1e-9,
        format!(
            "centroid {centroid:.3e}, variance {spread:.3e}, ellipse {ellipse:.3e} (tol 1e-6); \
             orientation flips: {flips}, relative area mismatch {asymmetry:.3e}"
        ),
    )
}

fn spectral_completeness() -> Outcome {
    let p = params(1.5, 0.5, Chirality::Retarded);
    let table = build_table(&p, None).unwrap();
    let grid = Grid2D::for_params(&p);
    let mut worst = 0.0f64;
    for t in [0.0, 0.7, PI, 5.1] {
        let a = evolve_spectral(&table, grid.clone(), t);
        let b = evolve_closed_form(&p, grid.clone(), t);
        worst = worst.max(phase_aligned_max_error(&a, &b));
    }
    outcome(
        worst <= 1e-8 && table.tail_mass < 1e-10 && grid.xi_axis().len() == 257,
        format!("max aligned difference = {worst:.3e} (tol 1e-8), tail_mass = {:.3e}", table.tail_mass),
    )
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_coherent2d")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn cli_contract() -> Outcome {
    let (verify_code, _) = run_cli(&["verify"]);
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut stable = true;
    for (args, file) in [
        (["coeffs", "--xi0", "1", "--eta0", "1"], "coeffs_xi0_1_eta0_1.csv"),
        (["observables", "--xi0", "2", "--eta0", "2"], "observables_xi0_2_eta0_2.csv"),
    ] {
        let expected = std::fs::read(golden.join(file)).unwrap();
        for _ in 0..2 {
            let (code, bytes) = run_cli(&args);
            stable &= code == 0 && bytes == expected;
        }
    }
    outcome(
        verify_code == 0 && stable,
        format!("verify exit code {verify_code}, golden outputs byte-stable: {stable}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("coefficient oracle", coefficient_oracle),
        ("circular support", circular_support),
        ("normalization", normalization),
        ("moment identities", moment_identities),
        ("laguerre integral identity", laguerre_identity),
        ("classical correspondence", classical_correspondence),
        ("spectral completeness", spectral_completeness),
        ("cli contract", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {name}: {status} {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
