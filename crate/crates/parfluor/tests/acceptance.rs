//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! `PARFLUOR_ACCEPTANCE=1,2,5` runs a subset. Criteria 6 to 8 run full
//! Wigner ensembles and take tens of minutes on a single core.

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use parfluor::calibrate::{calibrate_gain, CalibrationOptions};
use parfluor::config::default_matrix;
use parfluor::ensemble::{run_ensemble, DEFAULT_BATCH};
use parfluor::fft::Fft3;
use parfluor::io::load_material;
use parfluor::propagate::Propagator;
use parfluor::simulation::{run_simulation, FrameKind, SimulationSetup};
use parfluor::spectra::{scan_curve_par, spectrum_par};
use parfluor_core::dispersion::{CrystalSpec, SellmeierSet, SpectralPoint};
use parfluor_core::perturbative::{
    flux_closed_form, flux_quadrature_exact, flux_quadrature_gaussianized, Method, PumpSpec,
};
use parfluor_core::phasematch::{exterior_angle, perfect_curve, CurveRow};
use parfluor_core::quadrature::QuadratureSpec;
use parfluor_core::units::{omega_from_wavelength_nm, FS, MM, UM};
use parfluor_core::wigner::bogoliubov::{bogoliubov_coeffs, determinant};
use parfluor_core::wigner::{
    azimuthal_average, sample_vacuum, BinSpec, EnsembleSpec, FluxMap, ReferenceFrame,
    SimulationGrid,
};

type BoxError = Box<dyn std::error::Error + Send + Sync>;

enum Status {
    Pass,
    Fail,
    NotReproducible,
}

struct Verdict {
    status: Status,
    detail: String,
}

impl Verdict {
    fn check(ok: bool, detail: String) -> Self {
        Verdict {
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        }
    }
}

type Check = Result<Verdict, BoxError>;

const LENGTH: f64 = 2.0 * MM;
const CUTS: [f64; 4] = [29.0, 31.3, 35.0, 40.0];

fn crystal(theta_deg: f64) -> Result<CrystalSpec, BoxError> {
    let material = load_material("bbo")?;
    Ok(CrystalSpec::new(
        material,
        theta_deg.to_radians(),
        LENGTH,
        omega_from_wavelength_nm(400.0),
    )?)
}

fn pump(c: &CrystalSpec, tau_fs: f64, width_um: f64, gain: f64) -> Result<PumpSpec, BoxError> {
    Ok(PumpSpec::new(
        tau_fs * FS,
        width_um * UM,
        c.pump_center_omega,
        LENGTH / gain,
    )?)
}

fn index(s: &SellmeierSet, lambda_nm: f64) -> f64 {
    let l2 = (lambda_nm * 1e-3).powi(2);
    (s.b0 + s.b1 / (l2 - s.c1) - s.b2 * l2).sqrt()
}

fn max_over_median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    let median = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    v[n - 1] / median
}

fn criterion_1() -> Check {
    let m = load_material("bbo")?;
    let (no4, ne4, no8) = (
        index(&m.sellmeier_o, 400.0),
        index(&m.sellmeier_e, 400.0),
        index(&m.sellmeier_o, 800.0),
    );
    // n_e(θ, 400 nm) = n_o(800 nm) with 1/n_e(θ)² = cos²θ/n_o² + sin²θ/n_e²
    let s2 = (no8.powi(-2) - no4.powi(-2)) / (ne4.powi(-2) - no4.powi(-2));
    let theta_oracle = s2.sqrt().asin().to_degrees();

    let start = Instant::now();
    let omega = omega_from_wavelength_nm(800.0);
    let step = 0.001;
    let thetas: Vec<f64> = (0..=600).map(|i| 28.7 + step * i as f64).collect();
    let k0: Vec<Option<f64>> = thetas
        .par_iter()
        .map(|&t| Ok(perfect_curve(omega, &crystal(t)?)?.map(|p| p.k0)))
        .collect::<Result<_, BoxError>>()?;
    let elapsed = start.elapsed().as_secs_f64();
    let Some(first) = k0.iter().position(Option::is_some) else {
        return Ok(Verdict::check(
            false,
            "no match at 800 nm in 28.7°..29.3°".into(),
        ));
    };
    let theta = thetas[first];
    let k = k0[first].unwrap();
    // k⁰ at the onset is bounded by the square-root growth over one step
    let k_next = k0.get(first + 1).copied().flatten().unwrap_or(f64::NAN);
    let ok =
        (theta - theta_oracle).abs() <= step + 1e-9 && (theta - 29.0).abs() <= 0.3 && elapsed < 1.0;
    Ok(Verdict::check(
        ok,
        format!(
            "onset θ = {theta:.3}° (k⁰ = {k:.3e}, next {k_next:.3e} rad/m), oracle θ = {theta_oracle:.4}°, scan {elapsed:.2}s"
        ),
    ))
}

fn alpha_deg(row: &CurveRow) -> Option<f64> {
    row.alpha_ext.map(f64::to_degrees)
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let n = 1201;
    let curves: Vec<Vec<CurveRow>> = CUTS
        .iter()
        .map(|&t| Ok(scan_curve_par(550.0, 1150.0, n, &crystal(t)?)?))
        .collect::<Result<_, BoxError>>()?;
    let (mut common, mut ordered) = (0, 0);
    for i in 0..n {
        let a: Vec<f64> = curves.iter().filter_map(|c| alpha_deg(&c[i])).collect();
        if a.len() == CUTS.len() {
            common += 1;
            if a.windows(2).all(|w| w[1] > w[0]) {
                ordered += 1;
            }
        }
    }
    // touch point of the 29° curve: middle of the gap around the minimum, or the minimum itself
    let c29 = &curves[0];
    let near: Vec<(f64, Option<f64>)> = c29
        .iter()
        .filter(|r| (r.lambda_nm - 800.0).abs() <= 100.0)
        .map(|r| (r.lambda_nm, alpha_deg(r)))
        .collect();
    let gap: Vec<f64> = near
        .iter()
        .filter(|(_, a)| a.is_none())
        .map(|(l, _)| *l)
        .collect();
    let (amin, lmin) = near.iter().filter_map(|(l, a)| a.map(|a| (a, *l))).fold(
        (f64::INFINITY, f64::NAN),
        |b, x| if x.0 < b.0 { x } else { b },
    );
    let touch = if gap.is_empty() {
        lmin
    } else {
        0.5 * (gap[0] + gap[gap.len() - 1])
    };
    let elapsed = start.elapsed().as_secs_f64();
    let ok = common > 0
        && ordered == common
        && amin < 0.5
        && (touch - 800.0).abs() <= 10.0
        && elapsed < 5.0;
    let gap_text = if gap.is_empty() {
        "no gap".to_string()
    } else {
        format!("no-match gap {:.1}..{:.1} nm", gap[0], gap[gap.len() - 1])
    };
    Ok(Verdict::check(
        ok,
        format!(
            "ordered at {ordered}/{common} common wavelengths; 29° curve: {gap_text}, touches α = 0 at {touch:.1} nm (min α {amin:.3}°); {elapsed:.2}s"
        ),
    ))
}

fn criterion_3() -> Check {
    let lambdas: Vec<f64> = (0..13).map(|i| 550.0 + 50.0 * i as f64).collect();
    let gauss_quad = QuadratureSpec::default().with_rel_tol(1e-3);
    let exact_quad = QuadratureSpec::default();
    let mut jobs = Vec::new();
    for cell in default_matrix() {
        let c = crystal(cell.theta_deg)?;
        let p = pump(&c, cell.tau_fs, cell.width_um, 1.0)?;
        for &l in &lambdas {
            let omega = omega_from_wavelength_nm(l);
            if let Some(pm) = perfect_curve(omega, &c)? {
                jobs.push((cell, c.clone(), p, omega, pm.k0));
            }
        }
    }
    let results: Vec<(f64, f64, f64)> = jobs
        .par_iter()
        .map(|(_, c, p, omega, k0)| {
            let kappa = SpectralPoint::new(*omega, *k0, 0.0);
            let cf = flux_closed_form(*omega, c, p)?.flux;
            let g = flux_quadrature_gaussianized(kappa, c, p, &gauss_quad)?.flux;
            let e = flux_quadrature_exact(kappa, c, p, &exact_quad)?.flux;
            Ok((cf, g, e))
        })
        .collect::<Result<_, BoxError>>()?;
    let (mut worst_g, mut worst_e) = (0.0f64, 0.0f64);
    let mut cells_ok = 0;
    let mut detail = String::new();
    for cell in default_matrix() {
        let mut cell_ok = true;
        let mut n = 0;
        for ((jc, ..), &(cf, g, e)) in jobs.iter().zip(&results) {
            if jc != &cell {
                continue;
            }
            n += 1;
            let (rg, re) = ((cf - g).abs() / g, (cf - e).abs() / e);
            worst_g = worst_g.max(rg);
            worst_e = worst_e.max(re);
            cell_ok &= rg <= 0.01 && re <= 0.25;
        }
        if cell_ok && n > 0 {
            cells_ok += 1;
        } else {
            let _ = write!(detail, " failing cell {}", cell.label());
        }
    }
    Ok(Verdict::check(
        cells_ok == 12,
        format!(
            "{cells_ok}/12 cells, {} curve points; worst closed-form vs gaussianized {:.3}%, vs exact {:.1}%{detail}",
            jobs.len(),
            100.0 * worst_g,
            100.0 * worst_e
        ),
    ))
}

/// Local maxima of `v` over interior points, by wavelength.
fn local_maxima(rows: &[(f64, f64)]) -> Vec<f64> {
    rows.windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 >= w[2].1)
        .map(|w| w[1].0)
        .collect()
}

struct WalkOff {
    crossings: Vec<f64>,
    maxima: Vec<f64>,
    /// Crossings farther than 20 nm from every local maximum.
    unmatched: Vec<(f64, f64)>,
}

fn walk_off_maxima(theta: f64, lo: f64, hi: f64, n: usize) -> Result<WalkOff, BoxError> {
    let c = crystal(theta)?;
    let p = pump(&c, 60.0, 80.0, 1.0)?;
    let curve = scan_curve_par(lo, hi, n, &c)?;
    let spec = spectrum_par(
        lo,
        hi,
        n,
        &c,
        &p,
        Method::ClosedForm,
        &QuadratureSpec::default(),
    )?;
    let step = (hi - lo) / (n - 1) as f64;
    let db: Vec<(f64, f64)> = curve
        .iter()
        .filter_map(|r| r.coeffs.map(|k| (r.lambda_nm, k.d_beta1)))
        .collect();
    // only between adjacent scan points; a gap in the curve is not a crossing
    let crossings: Vec<f64> = db
        .windows(2)
        .filter(|w| w[1].0 - w[0].0 < 1.5 * step && w[0].1.signum() != w[1].1.signum())
        .map(|w| w[0].0 + (w[1].0 - w[0].0) * w[0].1 / (w[0].1 - w[1].1))
        .collect();
    let flux: Vec<(f64, f64)> = spec
        .iter()
        .filter_map(|r| r.point.map(|p| (r.lambda_nm, p.flux)))
        .collect();
    let maxima = local_maxima(&flux);
    let unmatched = crossings
        .iter()
        .map(|&x| {
            (
                x,
                maxima
                    .iter()
                    .map(|m| (m - x).abs())
                    .fold(f64::INFINITY, f64::min),
            )
        })
        .filter(|&(_, d)| d > 20.0)
        .collect();
    Ok(WalkOff {
        crossings,
        maxima,
        unmatched,
    })
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.round()).collect()
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let w = walk_off_maxima(31.3, 500.0, 1200.0, 1401)?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut detail = format!(
        "31.3°: {} zero crossing(s) of the pump-idler slowness difference in 500..1200 nm {:?}{}, spectrum maxima {:?}",
        w.crossings.len(),
        rounded(&w.crossings),
        if w.crossings.is_empty() { " (vacuous)" } else { "" },
        rounded(&w.maxima)
    );
    for (x, d) in &w.unmatched {
        let _ = write!(
            detail,
            "; crossing at {x:.1} nm is {d:.1} nm from the nearest maximum"
        );
    }
    // other cuts, not part of the check
    for theta in [29.0, 35.0, 40.0] {
        let o = walk_off_maxima(theta, 500.0, 1200.0, 1401)?;
        let _ = write!(
            detail,
            "; {theta}° (diagnostic): crossings {:?}, maxima {:?}",
            rounded(&o.crossings),
            rounded(&o.maxima)
        );
    }
    Ok(Verdict::check(
        w.unmatched.is_empty() && elapsed < 10.0,
        format!("{detail}; {elapsed:.2}s"),
    ))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let c = crystal(31.3)?;
    let ratio = |tau: f64| -> Result<f64, BoxError> {
        let p = pump(&c, tau, 80.0, 1.0)?;
        let rows = spectrum_par(
            500.0,
            1200.0,
            141,
            &c,
            &p,
            Method::ClosedForm,
            &QuadratureSpec::default(),
        )?;
        Ok(max_over_median(
            rows.iter()
                .filter_map(|r| r.point.map(|p| p.flux))
                .collect(),
        ))
    };
    let (r60, r120) = (ratio(60.0)?, ratio(120.0)?);
    let elapsed = start.elapsed().as_secs_f64();
    Ok(Verdict::check(
        r120 < r60 && elapsed < 10.0,
        format!(
            "max/median along the curve: {r60:.4} at 60 fs, {r120:.4} at 120 fs; {elapsed:.2}s"
        ),
    ))
}

struct BinComparison {
    compared: usize,
    within: usize,
    worst: String,
}

fn compare_bins(map: &FluxMap, oracle: &[Option<f64>], min_modes: u32) -> BinComparison {
    let mut out = BinComparison {
        compared: 0,
        within: 0,
        worst: String::new(),
    };
    let mut worst = 0.0;
    for (i, o) in oracle.iter().enumerate() {
        let Some(o) = *o else { continue };
        if map.n_modes[i] < min_modes {
            continue;
        }
        out.compared += 1;
        let (w, se) = (map.flux[i], map.stderr[i]);
        let tol = 3.0 * se + 0.25 * o.abs();
        if (w - o).abs() <= tol {
            out.within += 1;
        }
        let excess = (w - o).abs() / tol;
        if excess > worst {
            worst = excess;
            out.worst = format!("worst bin {w:.3e} vs {o:.3e} (SE {se:.1e})");
        }
    }
    out
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let c = crystal(29.0)?;
    let p = pump(&c, 60.0, 80.0, 0.1)?;
    let grid = SimulationGrid::desk_default(&p);
    let setup = SimulationSetup::new(c.clone(), p, grid);
    let ensemble = EnsembleSpec {
        n_realizations: 100,
        seed: 2024,
    };
    let out = run_simulation(&setup, &ensemble)?;
    let sim_time = start.elapsed().as_secs_f64();
    let bins = BinSpec::for_grid(&grid);
    let plain = azimuthal_average(&out.ensemble.plain, &grid, &bins);
    let referenced = azimuthal_average(&out.ensemble.referenced, &grid, &bins);

    // oracle: mean single-mode occupation of up to 8 member modes per bin
    let min_modes = 20;
    let n_bins = bins.n_lambda() * bins.n_alpha();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_bins];
    for i in (0..grid.len()).filter(|&i| grid.is_paired(i)) {
        let k = grid.spectral_point(i);
        if let Some((ia, il)) = bins.locate_mode(k.omega, k.k_trans()) {
            members[ia * bins.n_lambda() + il].push(i);
        }
    }
    let dv = grid.mode_volume();
    let quad = QuadratureSpec {
        n_start: 16,
        n_max: 128,
        rel_tol: 0.02,
        abs_tol: 1e-9 / dv,
        ..QuadratureSpec::default()
    };
    let oracle: Vec<Option<f64>> = members
        .par_iter()
        .map(|m| {
            if m.len() < min_modes as usize {
                return Ok(None);
            }
            let picks = m.len().min(8);
            let mut s = 0.0;
            for j in 0..picks {
                let k = grid.spectral_point(m[j * m.len() / picks]);
                s += flux_quadrature_exact(k, &c, &p, &quad)?.flux * dv;
            }
            Ok(Some(s / picks as f64))
        })
        .collect::<Result<_, BoxError>>()?;

    let a = compare_bins(&plain, &oracle, min_modes);
    let b = compare_bins(&referenced, &oracle, min_modes);
    // photon total over the oracle's bins; the error treats modes as
    // independent, which understates it by about √2 since pairs co-vary
    let total = |map: &FluxMap| -> String {
        let (mut t, mut v) = (0.0, 0.0);
        for i in (0..n_bins).filter(|&i| oracle[i].is_some()) {
            let n = map.n_modes[i] as f64;
            t += map.flux[i] * n;
            v += (map.stderr[i] * n).powi(2);
        }
        format!("{t:.4} ± {:.4}", v.sqrt())
    };
    // two-sided 3σ tail of a normal
    let chance = a.compared as f64 * 0.0027;
    let oracle_total: f64 = oracle
        .iter()
        .enumerate()
        .filter_map(|(i, o)| o.map(|o| o * members[i].len() as f64))
        .sum();
    let elapsed = start.elapsed().as_secs_f64();
    Ok(Verdict::check(
        a.compared > 0 && a.within == a.compared,
        format!(
            "plain: {}/{} bins within 3 SE + 25% ({}; about {chance:.0} expected outside by chance alone); referenced: {}/{} ({}); photons in compared bins: oracle {:.4}, plain {}, referenced {}; simulation {sim_time:.0}s, total {elapsed:.0}s",
            a.within,
            a.compared,
            a.worst,
            b.within,
            b.compared,
            b.worst,
            oracle_total,
            total(&plain),
            total(&referenced)
        ),
    ))
}

/// 31.3° at desk scale with the transverse window opened up to the curve.
fn high_gain_geometry() -> Result<(CrystalSpec, PumpSpec, SimulationGrid), BoxError> {
    let c = crystal(31.3)?;
    let p = pump(&c, 60.0, 80.0, 0.1)?;
    let grid = SimulationGrid {
        n_t: 64,
        n_x: 128,
        n_y: 128,
        span_t: 6.0 * p.tau,
        ..SimulationGrid::desk_default(&p)
    }
    .with_transverse_kmax(1.25e6);
    grid.validate(&c)?;
    Ok((c, p, grid))
}

const HIGH_GAIN_SEED: u64 = 7;

fn criteria_7_and_8() -> Result<(Verdict, Verdict), BoxError> {
    let start = Instant::now();
    let (c, p, grid) = high_gain_geometry()?;
    let frame = FrameKind::CoMoving.build(&c, grid.omega_center)?;
    let cal = calibrate_gain(
        1e6,
        &c,
        &p,
        &grid,
        &frame,
        HIGH_GAIN_SEED,
        DEFAULT_BATCH,
        &CalibrationOptions::default(),
    )?;
    let ensemble = EnsembleSpec {
        n_realizations: 10,
        seed: HIGH_GAIN_SEED,
    };
    let high = run_simulation(
        &SimulationSetup::new(
            c.clone(),
            PumpSpec {
                l_nl: cal.l_nl,
                ..p
            },
            grid,
        ),
        &ensemble,
    )?;
    let low = run_simulation(&SimulationSetup::new(c.clone(), p, grid), &ensemble)?;
    let elapsed = start.elapsed().as_secs_f64();

    let map = &high.map;
    let (mut columns, mut near) = (0, 0);
    let mut misses = Vec::new();
    for (il, r) in map.ridge(1).iter().enumerate() {
        let Some((ia, _)) = r else { continue };
        columns += 1;
        let lambda = map.lambda_center(il);
        let omega = omega_from_wavelength_nm(lambda);
        let target = perfect_curve(omega, &c)?
            .and_then(|pm| exterior_angle(omega, pm.k0).ok())
            .and_then(|a| map.bins.locate(lambda, a.to_degrees()));
        match target {
            Some((ta, _)) if ta.abs_diff(*ia) <= 2 => near += 1,
            Some((ta, _)) => misses.push(format!("{lambda:.0} nm: ridge bin {ia}, curve bin {ta}")),
            None => misses.push(format!("{lambda:.0} nm: curve outside the map")),
        }
    }
    let frac = near as f64 / columns.max(1) as f64;
    let v7 = Verdict::check(
        columns > 0 && frac >= 0.9,
        format!(
            "L/L_NL = {:.3} for {:.3e} photons ({} probes); ridge within 2 bins of the curve at {near}/{columns} wavelengths ({:.0}%){}; {elapsed:.0}s",
            cal.gain,
            high.total_photons,
            cal.probes.len(),
            100.0 * frac,
            if misses.is_empty() { String::new() } else { format!("; {}", misses.join(", ")) }
        ),
    );

    let bins = BinSpec::for_grid(&grid);
    let contrast = |est: &parfluor_core::wigner::FluxEstimate| {
        azimuthal_average(est, &grid, &bins).bin_contrast(20)
    };
    let (hi_ref, lo_ref) = (
        contrast(&high.ensemble.referenced),
        contrast(&low.ensemble.referenced),
    );
    let (hi_plain, lo_plain) = (
        contrast(&high.ensemble.plain),
        contrast(&low.ensemble.plain),
    );
    let fmt = |x: Option<f64>| x.map_or("undefined".to_string(), |v| format!("{v:.3e}"));
    let v8 = Verdict::check(
        matches!((hi_ref, lo_ref), (Some(h), Some(l)) if h > l),
        format!(
            "max/median bin ratio, vacuum-referenced: {} at high gain vs {} at L/L_NL = 0.1; plain: {} vs {}",
            fmt(hi_ref),
            fmt(lo_ref),
            fmt(hi_plain),
            fmt(lo_plain)
        ),
    );
    Ok((v7, v8))
}

fn rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let e: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let n: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (e / n).sqrt()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let c = crystal(29.0)?;
    let p = pump(&c, 60.0, 80.0, 1.0)?;
    let desk = SimulationGrid::desk_default(&p);
    let mut failures = Vec::new();

    let fft = Fft3::new(&desk);
    let mut ws = fft.workspace();
    let v = sample_vacuum(&desk, 1, 0);
    let mut d = v.data.clone();
    fft.to_position(&mut d, &mut ws);
    let parseval = (norm(&d) - norm(&v.data)).abs() / norm(&v.data);
    fft.to_spectral(&mut d, &mut ws);
    let roundtrip = rel_diff(&d, &v.data);
    if parseval > 1e-12 || roundtrip > 1e-12 {
        failures.push("transform");
    }

    let small = SimulationGrid {
        n_t: 32,
        n_x: 32,
        n_y: 32,
        n_z: 50,
        ..desk
    };
    let frame = ReferenceFrame::co_moving(&c, small.omega_center)?;
    let linear = Propagator::new(&c, &pump(&c, 60.0, 80.0, 0.0)?, &small, &frame)?;
    let mut f = sample_vacuum(&small, 2, 0);
    let n0 = f.norm_sqr();
    linear.propagate(&mut f)?;
    let norm_change = (f.norm_sqr() - n0).abs() / n0;
    if norm_change > 1e-12 {
        failures.push("linear norm");
    }

    let mut det_err = 0.0f64;
    for i in 0..1000 {
        let x = i as f64 * 0.618_033_988_75;
        let g = Complex64::from_polar(10f64.powf(-3.0 + 6.0 * x.fract()), 7.0 * x);
        let (cc, s) = bogoliubov_coeffs(g, 1e-5 * (1.0 + (3.0 * x).fract()));
        det_err = det_err.max((determinant(cc, s) - 1.0).abs());
    }
    if det_err > 1e-12 {
        failures.push("determinant");
    }

    let tiny = SimulationGrid {
        n_t: 16,
        n_x: 16,
        n_y: 16,
        n_z: 4,
        ..desk
    };
    let null_prop = Propagator::new(&c, &pump(&c, 60.0, 80.0, 0.0)?, &tiny, &frame)?;
    let null = run_ensemble(
        &null_prop,
        &EnsembleSpec {
            n_realizations: 200,
            seed: 3,
        },
        DEFAULT_BATCH,
    )?
    .plain;
    let se = null.stderr.as_ref().expect("200 realizations");
    let inside = null
        .flux
        .iter()
        .zip(se)
        .filter(|(f, s)| f.abs() <= 3.0 * **s)
        .count();
    let frac = inside as f64 / null.flux.len() as f64;
    let total_se = se.iter().map(|s| s * s).sum::<f64>().sqrt();
    if frac < 0.99 || null.total().abs() > 3.0 * total_se {
        failures.push("vacuum null");
    }

    let setup = SimulationSetup {
        batch_size: 1,
        ..SimulationSetup::new(
            c.clone(),
            pump(&c, 60.0, 80.0, 2.0)?,
            SimulationGrid { n_z: 20, ..small },
        )
    };
    let e = EnsembleSpec {
        n_realizations: 4,
        seed: 99,
    };
    let a = run_simulation(&setup, &e)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build()?;
    let b = pool.install(|| {
        run_simulation(
            &SimulationSetup {
                batch_size: 3,
                ..setup.clone()
            },
            &e,
        )
    })?;
    let same = a
        .ensemble
        .plain
        .flux
        .iter()
        .zip(&b.ensemble.plain.flux)
        .all(|(x, y)| x.to_bits() == y.to_bits());
    if !same {
        failures.push("reproducibility");
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 60.0 {
        failures.push("runtime");
    }
    Ok(Verdict::check(
        failures.is_empty(),
        format!(
            "Parseval {parseval:.1e}, roundtrip {roundtrip:.1e}, linear-step norm {norm_change:.1e}, det−1 {det_err:.1e}, vacuum null {:.1}% of modes within 3 SE (total {:.2e} ± {total_se:.1e}), bit-identical across batches/threads: {same}; {elapsed:.1}s{}",
            100.0 * frac,
            null.total(),
            if failures.is_empty() { String::new() } else { format!("; failed: {}", failures.join(", ")) }
        ),
    ))
}

fn criterion_10() -> Check {
    Ok(Verdict {
        status: Status::NotReproducible,
        detail: "bin-by-bin high-gain map values and absolute spectral axes depend on grids, windows and a unit \
                 calibration that are not published; covered qualitatively by criteria 3 to 8"
            .into(),
    })
}

fn report(n: u32, title: &str, result: Check, seconds: f64) -> bool {
    let (tag, detail, failed) = match result {
        Ok(v) => match v.status {
            Status::Pass => ("PASS", v.detail, false),
            Status::Fail => ("FAIL", v.detail, true),
            Status::NotReproducible => ("N/A ", v.detail, false),
        },
        Err(e) => ("FAIL", format!("error: {e}"), true),
    };
    println!("criterion {n:>2} {tag} {title}: {detail} [{seconds:.1}s]");
    failed
}

type Criterion = (u32, &'static str, fn() -> Check);

fn selected() -> Option<Vec<u32>> {
    let s = std::env::var("PARFLUOR_ACCEPTANCE").ok()?;
    Some(s.split(',').filter_map(|x| x.trim().parse().ok()).collect())
}

fn main() -> ExitCode {
    let only = selected();
    let want = |n: u32| only.as_ref().is_none_or(|v| v.contains(&n));
    let simple: [Criterion; 6] = [
        (1, "degenerate phase matching near 29°", criterion_1),
        (2, "exterior-angle curve ordering", criterion_2),
        (3, "closed form vs quadratures on 12 cells", criterion_3),
        (4, "walk-off zero crossings at flux maxima", criterion_4),
        (5, "longer pulses flatten the spectrum", criterion_5),
        (9, "numerical invariants", criterion_9),
    ];
    let mut failed = false;
    for (n, title, f) in simple.iter().take(5) {
        if want(*n) {
            let t = Instant::now();
            let r = f();
            failed |= report(*n, title, r, t.elapsed().as_secs_f64());
        }
    }
    if want(6) {
        let t = Instant::now();
        let r = criterion_6();
        failed |= report(
            6,
            "Wigner vs perturbative quadrature at low gain",
            r,
            t.elapsed().as_secs_f64(),
        );
    }
    if want(7) || want(8) {
        let t = Instant::now();
        let (r7, r8) = match criteria_7_and_8() {
            Ok((a, b)) => (Ok(a), Ok(b)),
            Err(e) => (Err(e.to_string().into()), Err(e)),
        };
        let s = t.elapsed().as_secs_f64();
        if want(7) {
            failed |= report(7, "high-gain ridge follows the matching curve", r7, s);
        }
        if want(8) {
            failed |= report(8, "contrast grows with gain", r8, 0.0);
        }
    }
    let (n, title, f) = simple[5];
    if want(n) {
        let t = Instant::now();
        let r = f();
        failed |= report(n, title, r, t.elapsed().as_secs_f64());
    }
    if want(10) {
        failed |= report(10, "not reproducible at desk scale", criterion_10(), 0.0);
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
