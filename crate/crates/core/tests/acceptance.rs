//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! show up in `cargo test` output.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rotnum_core::catalog::{catalog, FamilySpec};
use rotnum_core::circle_map::Lift;
use rotnum_core::conjugacy::{c0_distance, MonotoneTable};
use rotnum_core::monotone_family::{
    build_global_conjugacy, continuity_modulus, drho_finite_difference, drho_formula, drho_irrational,
    identity_check, irrational_grid, positivity_check, rotation_time_limit,
};
use rotnum_core::rotation::rotation_number;
use rotnum_core::tongues::{matsumoto_probe, plateau_interval, Side};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn dehn() -> rotnum_core::FamilyMap {
    catalog(&FamilySpec::dehn(1.0 / (4.0 * PI))).unwrap()
}

fn rotation_enclosures() -> Outcome {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut details = Vec::new();
    let mut ok = true;
    for alpha in [1.0 / 3.0, 2f64.sqrt() - 1.0, golden] {
        let (est, dt) = timed(|| rotation_number(&Lift::rotation(alpha), 1e-8));
        let good = est.width() <= 1e-8 && est.contains(alpha) && dt <= Duration::from_secs(1);
        ok &= good;
        details.push(format!("alpha={alpha:.6} width={:.1e} time={:.3}s", est.width(), dt.as_secs_f64()));
    }
    check(ok, details.join("; "))
}

fn formula_q1() -> Outcome {
    let f = dehn();
    let formula = drho_formula(&f, 0.0, 0, 1, 1024).map_err(|e| e.to_string())?.formula_value;
    let fd = drho_finite_difference(&f, 0.0, 1e-4, 1e-6).map_err(|e| e.to_string())?;
    check(
        (formula - 1.0).abs() <= 1e-6 && (formula - fd).abs() <= 1e-3,
        format!("formula={formula:.12} fd={fd:.9}"),
    )
}

fn formula_q2() -> Outcome {
    let f = catalog(&FamilySpec::conj_rotation(0.05, 0.1)).unwrap();
    let formula = drho_formula(&f, 0.5, 1, 2, 1024).map_err(|e| e.to_string())?.formula_value;
    let fd = drho_finite_difference(&f, 0.5, 1e-4, 1e-6).map_err(|e| e.to_string())?;
    let target = 1.0 - 0.2 * PI;
    check(
        (formula - target).abs() <= 1e-4 && (formula - fd).abs() <= 1e-3,
        format!("formula={formula:.9} target={target:.9} fd={fd:.9}"),
    )
}

fn q_consistency() -> Outcome {
    let f = catalog(&FamilySpec::conj_rotation(0.05, 0.1)).unwrap();
    let single = drho_formula(&f, 0.5, 1, 2, 1024).map_err(|e| e.to_string())?.formula_value;
    let squared = drho_formula(&f.power(2), 0.5, 1, 1, 1024).map_err(|e| e.to_string())?.formula_value;
    check(
        (single - 0.5 * squared).abs() <= 1e-5,
        format!("q=2: {single:.12}  half of squared: {:.12}", 0.5 * squared),
    )
}

fn rotation_time() -> Outcome {
    let f = dehn();
    let (rows, dt) = timed(|| rotation_time_limit(&f, 0.0, &[1e-2, 1e-3, 1e-4]));
    let rows = rows.map_err(|e| e.to_string())?;
    let errors: Vec<f64> = rows.iter().map(|&(_, v)| (v - 1.0).abs()).collect();
    // With 1/t an integer the exact errors tie at zero, so "decreasing" is
    // read as non-increasing.
    let decreasing = errors.windows(2).all(|w| w[1] <= w[0]);
    check(
        decreasing && errors[2] <= 0.05 && dt <= Duration::from_secs(10),
        format!("errors={errors:?} time={:.3}s", dt.as_secs_f64()),
    )
}

fn identity_positivity_gates() -> Outcome {
    let f = dehn();
    let id_dehn = identity_check(&f, 0.0, 0, 1, 1000);
    let pos_dehn = positivity_check(&f, 0.0, 1, 1000);
    let g = catalog(&FamilySpec::conj_rotation(0.05, 0.0)).unwrap();
    let id_conj = identity_check(&g, 0.5, 1, 2, 1000);
    let pos_conj = positivity_check(&g, 0.5, 2, 1000);
    check(
        id_dehn <= 1e-10 && id_conj <= 1e-10 && pos_dehn > 0.0 && pos_conj > 0.0,
        format!("identity: dehn={id_dehn:.1e} conj={id_conj:.1e}; positivity: dehn={pos_dehn:.4} conj={pos_conj:.4}"),
    )
}

fn dehn_continuity() -> Outcome {
    let spec = FamilySpec::dehn(1.0 / (4.0 * PI));
    let f = catalog(&spec).unwrap();
    let grid = irrational_grid(0.3, 0.32, 50);
    let (samples, dt) = timed(|| build_global_conjugacy(&f, &grid, 100_000));
    let samples = samples.map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for s in &samples {
        let phi = spec.closed_form_conjugacy(s.t).unwrap().unwrap();
        let exact = MonotoneTable::from_fn(|x| phi.eval(x), 4096).unwrap();
        worst = worst.max(c0_distance(&s.table, &exact, 1000));
    }
    let report = continuity_modulus(&samples, 1000);
    check(
        worst <= 1e-2 && report.max_adjacent_distance <= 0.05 && report.max_defect <= 1e-2,
        format!(
            "closed-form distance={worst:.2e} adjacent={:.2e} defect={:.2e} time={:.1}s",
            report.max_adjacent_distance,
            report.max_defect,
            dt.as_secs_f64()
        ),
    )
}

fn example8_discontinuity() -> Outcome {
    let f = catalog(&FamilySpec::example8()).unwrap();
    let grid = [2.0 / (7.0 * PI), 2.0 / (5.0 * PI)];
    let (samples, dt) = timed(|| build_global_conjugacy(&f, &grid, 100_000));
    let samples = samples.map_err(|e| e.to_string())?;
    let gap = c0_distance(&samples[0].table, &samples[1].table, 1000);
    check(
        gap >= 0.12 && dt <= Duration::from_secs(30),
        format!("gap={gap:.4} (closed form {:.4}) time={:.1}s", 1.0 / (2.0 * PI), dt.as_secs_f64()),
    )
}

fn arnold_tongue() -> Outcome {
    let f = catalog(&FamilySpec::arnold(0.1)).unwrap();
    let pl = plateau_interval(&f, 0, 1, (-0.5, 0.5), 1e-6).map_err(|e| e.to_string())?;
    check(
        !pl.degenerate
            && (pl.t_left + 0.1).abs() <= 1e-6
            && (pl.t_right - 0.1).abs() <= 1e-6
            && pl.steps_left <= 60
            && pl.steps_right <= 60,
        format!(
            "[{:.9}, {:.9}] steps={}/{}",
            pl.t_left, pl.t_right, pl.steps_left, pl.steps_right
        ),
    )
}

fn matsumoto_contrast() -> Outcome {
    let deltas = [1e-2, 1e-3, 1e-4];
    let arnold = catalog(&FamilySpec::arnold(0.1)).unwrap();
    let edge = plateau_interval(&arnold, 0, 1, (-0.5, 0.5), 1e-6)
        .map_err(|e| e.to_string())?
        .t_right;
    let tongue = matsumoto_probe(&arnold, edge, Side::Above, &deltas, 1e-6).map_err(|e| e.to_string())?;
    let flat = matsumoto_probe(&dehn(), 0.0, Side::Above, &deltas, 1e-6).map_err(|e| e.to_string())?;
    let (rt, rf) = (tongue.growth_ratios(), flat.growth_ratios());
    check(
        !tongue.truncated
            && !flat.truncated
            && rt.len() == 2
            && rf.len() == 2
            && rt.iter().all(|&r| r >= 2.0)
            && rf.iter().all(|&r| r <= 1.1),
        format!("arnold ratios={rt:.3?} dehn ratios={rf:.4?}"),
    )
}

fn irrational_formula() -> Outcome {
    let f = catalog(&FamilySpec::rotation()).unwrap();
    let t0 = 2f64.sqrt() - 1.0;
    let v = drho_irrational(&f, t0, &MonotoneTable::identity(), 1024).map_err(|e| e.to_string())?;
    check((v - 1.0).abs() <= 1e-8, format!("value={v:.15}"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("rotation enclosure soundness", rotation_enclosures),
        ("derivative formula, q=1 (dehn)", formula_q1),
        ("derivative formula, q=2 (conj_rotation)", formula_q2),
        ("q-consistency", q_consistency),
        ("rotation-time limit", rotation_time),
        ("identity and positivity gates", identity_positivity_gates),
        ("global conjugacy continuity (dehn)", dehn_continuity),
        ("example8 discontinuity", example8_discontinuity),
        ("arnold 0/1 tongue", arnold_tongue),
        ("boundary slope contrast", matsumoto_contrast),
        ("irrational derivative formula", irrational_formula),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (outcome, dt) = timed(run);
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}: {name} [{detail}] ({:.2}s)", i + 1, dt.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
