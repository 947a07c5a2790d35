//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use dwfinsler::connection::SprayPath;
use dwfinsler::lab::{run_suites, DiagnosticsReport, Outcome, RunSpec, Suite};
use dwfinsler::metric::FIXTURES;
use dwfinsler::{fixture, DwGeometry, TangentSample};

const SEED: u64 = 42;
const POINTS: usize = 25;

fn run(name: &str, suites: &[Suite]) -> DiagnosticsReport {
    let mut spec = RunSpec::from_fixture(name, SEED).unwrap();
    spec.sampling.count = POINTS;
    spec.suites = suites.to_vec();
    run_suites(&spec).unwrap()
}

/// Largest residual of `suite.check`; a failed evaluation counts as infinite.
fn max_res(r: &DiagnosticsReport, suite: Suite, check: &str) -> f64 {
    let c = r.suite(suite).and_then(|s| s.check(check));
    c.and_then(|c| c.max_residual).unwrap_or(f64::INFINITY)
}

fn at(name: &str, x: &[f64], u: &[f64], y: &[f64], v: &[f64]) -> DwGeometry {
    let p = TangentSample::new(x.to_vec(), u.to_vec(), y.to_vec(), v.to_vec()).unwrap();
    DwGeometry::new(&fixture(name).unwrap(), &p).unwrap()
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn block_structure() -> Verdict {
    let mut worst = 0.0f64;
    for name in FIXTURES {
        let r = run(name, &[Suite::BlockStructure]);
        worst = worst.max(max_res(&r, Suite::BlockStructure, "metric-mixed"));
    }
    verdict(worst <= 1e-12, format!("max off-diagonal |g| = {worst:.2e}"))
}

fn spray_decomposition() -> Verdict {
    let mut worst = 0.0f64;
    for name in FIXTURES {
        let r = run(name, &[Suite::SprayDecomposition]);
        worst = worst.max(max_res(&r, Suite::SprayDecomposition, "generic-vs-decomposed"));
    }
    let d = at("FIX-1D", &[0.0], &[1.0], &[1.0], &[1.0]);
    let mut hand = 0.0f64;
    for path in [SprayPath::Generic, SprayPath::ProductDecomposed] {
        let s = d.spray(path).unwrap();
        hand = hand.max((s.get(&[0]) - 0.5).abs()).max((s.get(&[1]) + 0.5).abs());
    }
    verdict(worst <= 1e-9 && hand <= 1e-9, format!("generic vs decomposed {worst:.2e}, FIX-1D hand values off by {hand:.2e}"))
}

fn homogeneity() -> Verdict {
    let mut worst = 0.0f64;
    for name in FIXTURES {
        let r = run(name, &[Suite::Homogeneity]);
        worst = worst.max(max_res(&r, Suite::Homogeneity, "nonlinear-connection"));
    }
    verdict(worst <= 1e-8, format!("max |y·∂G^a_b − G^a_b| = {worst:.2e} over {POINTS} points per fixture"))
}

fn horizontal_contraction() -> Verdict {
    let mut worst = 0.0f64;
    for name in ["FIX-E", "FIX-R"] {
        let r = run(name, &[Suite::YfEqualsG]);
        worst = worst.max(max_res(&r, Suite::YfEqualsG, "contraction"));
    }
    verdict(worst <= 1e-8, format!("max |y^c F^a_bc − G^a_b| = {worst:.2e}"))
}

fn cartan_blocks() -> Verdict {
    let (mut mixed, mut pure) = (0.0f64, 0.0f64);
    for name in FIXTURES {
        let r = run(name, &[Suite::BlockStructure]);
        mixed = mixed.max(max_res(&r, Suite::BlockStructure, "cartan-mixed"));
        pure = pure.max(max_res(&r, Suite::BlockStructure, "cartan-pure"));
    }
    verdict(mixed <= 1e-12 && pure <= 1e-9, format!("mixed {mixed:.2e}, pure vs scaled factor {pure:.2e}"))
}

fn matsumoto() -> Verdict {
    let mut spec = RunSpec::from_fixture("FIX-R", SEED).unwrap();
    spec.sampling.count = POINTS;
    let points = dwfinsler::lab::sample_points(&spec).unwrap();
    let mut worst = 0.0f64;
    let mut witness = (0.0f64, 0usize);
    for (i, p) in points.iter().enumerate() {
        let c = DwGeometry::new(&spec.config, p).unwrap().matsumoto_contraction().unwrap();
        worst = worst.max(c.residual());
        if c.magnitude() > witness.0 {
            witness = (c.magnitude(), i);
        }
    }
    let p = &points[witness.1];
    verdict(
        worst <= 1e-8 && witness.0 > 1e-4,
        format!(
            "residual {worst:.2e}; both sides {:.3e} at point {} (x={:?}, u={:?}, y={:?}, v={:?})",
            witness.0, witness.1, p.x, p.u, p.y, p.v
        ),
    )
}

fn berwald() -> Verdict {
    let r = run("FIX-R", &[Suite::BerwaldBlocks]);
    let worst = max_res(&r, Suite::BerwaldBlocks, "closed-forms");
    let b = at("FIX-R", &[0.4, -0.3], &[0.7, 0.2], &[1.1, -0.6], &[0.5, 0.9]).berwald_curvature().max_abs();
    verdict(worst <= 1e-7 && b > 1e-3, format!("ten blocks vs jets {worst:.2e}; max|B| = {b:.3e} on FIX-R"))
}

fn hh_contraction() -> Verdict {
    let mut worst = 0.0f64;
    for name in FIXTURES {
        let r = run(name, &[Suite::HhContraction]);
        worst = worst.max(max_res(&r, Suite::HhContraction, "identity"));
    }
    verdict(worst <= 1e-7, format!("max |y^b R_b^a_cd − R^a_cd| = {worst:.2e}"))
}

fn flat_factor() -> Verdict {
    let r = run("FIX-E", &[Suite::FlatFactor]);
    let worst = max_res(&r, Suite::FlatFactor, "latin").max(max_res(&r, Suite::FlatFactor, "greek"));
    let hand = at("FIX-E", &[0.0, 0.0], &[1.0, 0.0], &[0.8, -0.4], &[0.3, 1.1]).hh_curvature().get(&[0, 1, 0, 1]);
    verdict(
        worst <= 1e-6 && (hand - 0.5).abs() <= 1e-6,
        format!("identity residual {worst:.2e}; R_2^1_12 = {hand:.12}"),
    )
}

fn scalar_flag() -> Verdict {
    let fit = at("FIX-E", &[0.0, 0.0], &[1.0, 0.0], &[0.8, -0.4], &[0.3, 1.1]).scalar_flag_residual().unwrap();
    let r = run("FIX-E", &[Suite::ScalarFlag]);
    let region = max_res(&r, Suite::ScalarFlag, "isotropy").max(max_res(&r, Suite::ScalarFlag, "coefficient"));
    verdict(
        (fit.lambda + 0.5).abs() <= 1e-6 && fit.defect <= 1e-6 && region <= 1e-6,
        format!("λ̂ = {:.12}, isotropy defect {:.2e}; sampled region {region:.2e}", fit.lambda, fit.defect),
    )
}

fn koszul() -> Verdict {
    let mut structural = 0.0f64;
    for name in FIXTURES {
        let r = run(name, &[Suite::KoszulVsClosed]);
        structural = structural
            .max(max_res(&r, Suite::KoszulVsClosed, "metric-compatibility"))
            .max(max_res(&r, Suite::KoszulVsClosed, "torsion"));
    }
    let r = run("FIX-P", &[Suite::KoszulVsClosed]);
    let closed_p = max_res(&r, Suite::KoszulVsClosed, "closed-forms");
    let p = [&[0.4, -0.3][..], &[0.7, 0.2], &[1.1, -0.6], &[0.5, 0.9]];
    for name in ["FIX-E", "FIX-R"] {
        let blocks = at(name, p[0], p[1], p[2], p[3]).levi_civita_discrepancy().unwrap();
        let table: Vec<String> = blocks.iter().map(|b| format!("{} {:.1e}", b.block, b.max_abs_diff)).collect();
        println!("    {name} per-block closed form vs Koszul: {}", table.join(", "));
    }
    verdict(
        structural <= 1e-7 && closed_p <= 1e-7,
        format!("metricity/torsion {structural:.2e} on all fixtures; closed forms on FIX-P {closed_p:.2e}"),
    )
}

fn vaisman() -> Verdict {
    let (mut ax, mut same) = (0.0f64, 0.0f64);
    for name in FIXTURES {
        let r = run(name, &[Suite::VaismanAxioms]);
        ax = ax.max(max_res(&r, Suite::VaismanAxioms, "axioms"));
        same = same.max(max_res(&r, Suite::VaismanAxioms, "same-connection"));
    }
    verdict(ax <= 1e-8 && same <= 1e-8, format!("axioms (i)-(iii) {ax:.2e}; induced/Vaisman agreement ⇔ F=G {same:.2e}"))
}

fn reinhart() -> Verdict {
    let mut riemannian = 0.0f64;
    let mut ident = 0.0f64;
    for name in ["FIX-1D", "FIX-E", "FIX-P"] {
        let r = run(name, &[Suite::Reinhart]);
        riemannian = riemannian.max(max_res(&r, Suite::Reinhart, "defect"));
        ident = ident.max(max_res(&r, Suite::Reinhart, "proof-identity"));
    }
    let r = run("FIX-R", &[Suite::Reinhart]);
    let rec = r.suite(Suite::Reinhart).unwrap();
    let defect = rec.check("defect").unwrap();
    ident = ident.max(max_res(&r, Suite::Reinhart, "proof-identity"));
    let w = defect.witness.as_ref();
    let witness = w.and_then(|w| w.detail.clone()).unwrap_or_default();
    let r_defect = defect.max_residual.unwrap_or(0.0);
    verdict(
        riemannian <= 1e-10 && r_defect > 1e-3 && w.is_some_and(|w| w.sample.is_some()) && ident <= 1e-8 && rec.outcome == Outcome::ExpectedFail,
        format!("Riemannian {riemannian:.2e}; FIX-R {r_defect:.3e} at [{witness}]; Cartan identity {ident:.2e}"),
    )
}

fn complex_structure() -> Verdict {
    let mut worst = [0.0f64; 6];
    for name in FIXTURES {
        let r = run(name, &[Suite::Hermitian, Suite::Nijenhuis]);
        let h = |c| max_res(&r, Suite::Hermitian, c);
        for (k, v) in [h("j-squared"), h("metric"), h("omega-table"), h("d-omega"), max_res(&r, Suite::Nijenhuis, "closed-vs-direct")]
            .into_iter()
            .enumerate()
        {
            worst[k] = worst[k].max(v);
        }
        worst[5] = worst[5].max(h("liouville"));
    }
    let kahler = |name: &str| {
        let r = run(name, &[Suite::Kahler]);
        let rec = r.suite(Suite::Kahler).unwrap();
        let consistent = rec.check("biconditional").unwrap().max_residual == Some(0.0);
        let flat = rec.check("bracket-curvature").unwrap().max_residual.unwrap_or(f64::INFINITY) <= 1e-7;
        let nj = rec.check("nijenhuis").unwrap().max_residual.unwrap_or(f64::INFINITY) <= 1e-7;
        (consistent, flat && nj)
    };
    let (cp, kp) = kahler("FIX-P");
    let (ce, ke) = kahler("FIX-E");
    let [js, herm, table, d_omega, nij, liouville] = worst;
    verdict(
        js == 0.0 && herm <= 1e-10 && table <= 1e-10 && d_omega <= 1e-5 && nij <= 1e-7 && cp && ce && kp && !ke,
        format!(
            "J² {js:.1e}, Hermitian {herm:.1e}, Ω table {table:.1e}, dΩ {d_omega:.1e}, Ω = −dω {liouville:.1e}, \
             N_J paths {nij:.1e}; Kähler FIX-P {kp}, FIX-E {ke}"
        ),
    )
}

fn ad_soundness() -> Verdict {
    let mut worst = (0.0f64, String::new());
    for name in FIXTURES {
        let mut spec = RunSpec::from_fixture(name, SEED).unwrap();
        spec.sampling.count = 5;
        for p in dwfinsler::lab::sample_points(&spec).unwrap() {
            let (r, label) = dwfinsler::lab::fd_crosscheck(&spec.config, &p).unwrap();
            if r > worst.0 {
                worst = (r, format!("{name} {label}"));
            }
        }
    }
    verdict(worst.0 <= 1e-5, format!("max relative |jet − fd| = {:.2e} at {}", worst.0, worst.1))
}

fn determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("dwf-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let diffable = |k: usize| {
        let path = dir.join(format!("run{k}.json"));
        let out = Command::new(env!("CARGO_BIN_EXE_dwf"))
            .args(["verify", "--fixture", "FIX-R", "--seed", "42", "--json"])
            .arg(&path)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        serde_json::to_string(&v["diffable"]).unwrap()
    };
    let (a, b) = (diffable(1), diffable(2));
    let _ = std::fs::remove_dir_all(&dir);
    verdict(a == b && !a.is_empty(), format!("diffable sections {} bytes, identical: {}", a.len(), a == b))
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<(&str, fn() -> Verdict)> = vec![
        ("block structure", block_structure),
        ("spray decomposition", spray_decomposition),
        ("homogeneity", homogeneity),
        ("horizontal coefficients contract to the nonlinear connection", horizontal_contraction),
        ("Cartan blocks", cartan_blocks),
        ("Matsumoto contraction", matsumoto),
        ("Berwald blocks", berwald),
        ("hh-curvature contraction", hh_contraction),
        ("flat-factor identity", flat_factor),
        ("scalar-flag relation", scalar_flag),
        ("Koszul Levi-Civita", koszul),
        ("Vaisman axioms", vaisman),
        ("Reinhart biconditional", reinhart),
        ("complex structure", complex_structure),
        ("AD soundness", ad_soundness),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.into_iter().enumerate() {
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            verdict(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        println!("{} {:>2} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, k + 1, v.detail);
        if !v.pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
