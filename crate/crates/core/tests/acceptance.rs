//! Acceptance suite: one PASS/FAIL line per criterion. Lines listed in
//! KNOWN_DEVIATIONS are expected to fail (see the decisions ledger) and do
//! not change the exit status; any other failure does.

use std::time::Instant;

use kerrmodes::asymptotics::{
    convergence_slope, db_field, h_field, nonlinearity_h, two_layer_solvability, ExpansionSetup,
};
use kerrmodes::eigenfunctions::{eigenfunction, pencil_residual};
use kerrmodes::fd::system::residual;
use kerrmodes::fd::*;
use kerrmodes::materials::{LayeredGeometry, MaterialLayer, Sandwich};
use kerrmodes::roots::Region;
use kerrmodes::spectrum2::{closed_form_pt_drude, find_eigenvalues2, EigsOptions};
use kerrmodes::spectrum3::{
    alpha3, beta3, dispersion3_terms, find_eigenvalues3, is_real_width, layer_width_dm, pairing3, SandwichState,
};
use kerrmodes::C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Criteria that fail for documented reasons (stated k for the non-PT
/// example, printed alpha).
const KNOWN_DEVIATIONS: &[&str] = &["2", "4b", "7b", "3-swap"];

const OMEGA_PT: f64 = 1.7914;
const OMEGA_NPT: (f64, f64) = (0.4679, -0.061);
const NU_PT: f64 = -0.2572;
const NU_NPT: (f64, f64) = (-0.0336, -0.0054);

struct Report {
    lines: Vec<(String, bool)>,
}

impl Report {
    fn line(&mut self, id: &str, pass: bool, what: &str) {
        let tag = if pass { "PASS" } else { "FAIL" };
        let known = if !pass && KNOWN_DEVIATIONS.contains(&id) { " [known deviation]" } else { "" };
        println!("{tag} {id:<8} {what}{known}");
        self.lines.push((id.to_string(), pass));
    }

    fn info(&self, id: &str, what: &str) {
        println!("INFO {id:<8} {what}");
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn pt_geometry() -> LayeredGeometry {
    let a = MaterialLayer::drude(0.5, 0.7).with_chi3(c(1.0, 0.0));
    LayeredGeometry::two_layer(a.clone(), a.pt_partner())
}

fn npt_geometry() -> LayeredGeometry {
    LayeredGeometry::two_layer(
        MaterialLayer::drude(0.8, 1.0).with_chi3(c(1.0, 0.0)),
        MaterialLayer::constant(c(1.0, 0.0)).with_chi3(c(1.0, 0.0)),
    )
}

fn sandwich() -> (Sandwich, f64) {
    let left = MaterialLayer::drude(1.0, -0.5);
    (
        Sandwich {
            right: left.pt_partner(),
            left,
            core: MaterialLayer::constant(c(0.2, 0.0)),
        },
        0.7,
    )
}

fn nearest(eigs: &[C64], t: C64) -> Option<C64> {
    eigs.iter().copied().min_by(|a, b| (a - t).norm().total_cmp(&(b - t).norm()))
}

fn eig2(k: f64, g: &LayeredGeometry, region: Region, t: C64) -> Option<C64> {
    let e = find_eigenvalues2(k, g, &region, &EigsOptions::default()).ok()?;
    nearest(&e.iter().map(|x| x.omega0).collect::<Vec<_>>(), t)
}

/// Distance from t to the polyline through the branch frequencies.
fn polyline_distance(ws: &[C64], t: C64) -> f64 {
    let mut best = ws.iter().map(|w| (w - t).norm()).fold(f64::INFINITY, f64::min);
    for s in ws.windows(2) {
        let d = s[1] - s[0];
        let l2 = d.norm_sqr();
        if l2 > 0.0 {
            let u = (((t - s[0]) * d.conj()).re / l2).clamp(0.0, 1.0);
            best = best.min((s[0] + d * u - t).norm());
        }
    }
    best
}

fn criterion1(r: &mut Report) {
    let t = Instant::now();
    let cf = closed_form_pt_drude(1.0, 0.5, 0.7).expect("closed form");
    let a = nearest(&cf.omega0_candidates, c(OMEGA_PT, 0.0));
    let b = eig2(1.0, &pt_geometry(), Region::new(0.1, 3.0, -1.0, 1.0).unwrap(), c(OMEGA_PT, 0.0));
    let dt = secs(t);
    match (a, b) {
        (Some(a), Some(b)) => {
            let ok = (a - OMEGA_PT).norm() <= 1e-3 && (b - OMEGA_PT).norm() <= 1e-3;
            let agree = (a - b).norm();
            r.line(
                "1",
                ok && agree <= 1e-8 && dt < 1.0,
                &format!("PT eigenvalue closed form {a:.8} root finder {b:.8} agree {agree:.1e} (tol 1e-8), {dt:.3}s (< 1s)"),
            );
        }
        _ => r.line("1", false, &format!("missing eigenvalue: closed form {a:?} root finder {b:?}")),
    }
}

fn criterion2(r: &mut Report) {
    for (id, k) in [("2", 1.0), ("2-k0.7", 0.7)] {
        let t = Instant::now();
        let w = eig2(k, &npt_geometry(), Region::new(0.1, 1.0, -0.5, 0.1).unwrap(), c(OMEGA_NPT.0, OMEGA_NPT.1));
        let dt = secs(t);
        let what = match w {
            Some(w) => {
                let ok = (w.re - OMEGA_NPT.0).abs() <= 2e-3 && (w.im - OMEGA_NPT.1).abs() <= 2e-3;
                r.line(
                    id,
                    ok && dt < 1.0,
                    &format!("non-PT eigenvalue at k={k}: {w:.6} vs 0.4679-0.061i (2e-3 per part), {dt:.3}s"),
                );
                continue;
            }
            None => format!("no eigenvalue found at k={k}"),
        };
        r.line(id, false, &what);
    }
}

fn criterion3(r: &mut Report) {
    let t = Instant::now();
    let (s, d) = sandwich();
    let eigs = find_eigenvalues3(2.0, &s, d, &Region::new(0.5, 5.0, -0.5, 0.5).unwrap(), &EigsOptions::default())
        .unwrap_or_default();
    let dt = secs(t);
    let targets = [1.11, 1.68, 3.09, 3.44, 4.57];
    let found: Vec<_> = targets
        .iter()
        .map(|&w| eigs.iter().find(|p| (p.omega - w).norm() <= 0.02))
        .collect();
    let all = eigs.len() == 5 && found.iter().all(|p| p.is_some());
    r.line(
        "3",
        all && dt < 10.0,
        &format!(
            "sandwich eigenvalues {:?} (5 within 0.02 of {targets:?}), {dt:.3}s (< 10s)",
            eigs.iter().map(|p| format!("{:.4}", p.omega.re)).collect::<Vec<_>>()
        ),
    );
    let mut ok = true;
    let mut seen = Vec::new();
    for p in found.iter().skip(2).flatten() {
        let a = p.alpha_value.value().map(|a| a.norm()).unwrap_or(0.0);
        let b = p.beta_value.value().map(|b| (d - b).norm()).unwrap_or(0.0);
        ok &= a > 1e-8 && b > 1e-3;
        seen.push(format!("{:.2}: |alpha|={a:.3} |d-beta|={b:.3}", p.omega.re));
    }
    r.line("3-simple", ok && seen.len() == 3, &format!("simple and isolated: {}", seen.join("; ")));
    // |alpha| should not depend on which outer layer is called left
    let swapped = Sandwich {
        left: s.right.clone(),
        core: s.core.clone(),
        right: s.left.clone(),
    };
    let w = c(3.09, 0.0);
    let dw = layer_width_dm(2.0, &s, w, 1).map(|x| x.re).unwrap_or(d);
    let aa = alpha3(2.0, &s, dw, w).ok().and_then(|e| e.value());
    let ab = alpha3(2.0, &swapped, dw, w).ok().and_then(|e| e.value());
    if let (Some(aa), Some(ab)) = (aa, ab) {
        r.line(
            "3-swap",
            (aa.norm() - ab.norm()).abs() <= 1e-8 * aa.norm(),
            &format!("printed |alpha| under label swap at 3.09: {:.4} vs {:.4}", aa.norm(), ab.norm()),
        );
    }
    let sa = SandwichState::new(2.0, &s, w).unwrap();
    let sb = SandwichState::new(2.0, &swapped, w).unwrap();
    if let (Some(pa), Some(pb)) = (pairing3(&sa, dw).value(), pairing3(&sb, dw).value()) {
        r.info("3-swap", &format!("pairing route: {pa:.4} vs conj {:.4}", pb.conj()));
    }
}

struct Case {
    name: &'static str,
    k: f64,
    geometry: LayeredGeometry,
    omega_guess: C64,
    region: Region,
    l: f64,
    n: usize,
}

fn pt_case(n: usize) -> Case {
    Case {
        name: "PT",
        k: 1.0,
        geometry: pt_geometry(),
        omega_guess: c(1.79, 0.0),
        region: Region::new(0.1, 3.0, -1.0, 1.0).unwrap(),
        l: 120.0,
        n,
    }
}

fn npt_case(k: f64, n: usize) -> Case {
    Case {
        name: if k == 1.0 { "non-PT k=1" } else { "non-PT k=0.7" },
        k,
        geometry: npt_geometry(),
        omega_guess: if k == 1.0 { c(0.627, -0.121) } else { c(0.468, -0.061) },
        region: Region::new(0.1, 1.0, -0.5, 0.1).unwrap(),
        l: 100.0,
        n,
    }
}

fn setup(case: &Case) -> Option<ExpansionSetup> {
    let w0 = eig2(case.k, &case.geometry, case.region, case.omega_guess)?;
    ExpansionSetup::new(case.k, &case.geometry, w0, Grid1D::new(case.l, case.n).ok()?).ok()
}

fn criterion4(r: &mut Report) {
    let runs = [("4a", pt_case(17999), c(NU_PT, 0.0), 1e-2), ("4b", npt_case(1.0, 11999), c(NU_NPT.0, NU_NPT.1), 2e-2), ("4b-k0.7", npt_case(0.7, 11999), c(NU_NPT.0, NU_NPT.1), 2e-2)];
    for (id, case, target, tol) in runs {
        let t = Instant::now();
        let Some(su) = setup(&case) else {
            r.line(id, false, &format!("{}: setup failed", case.name));
            continue;
        };
        let nu = su.nu_grid.nu;
        let dt = secs(t);
        let ok = (nu.re - target.re).abs() <= tol && (nu.im - target.im).abs() <= tol;
        r.line(
            id,
            ok && dt < 30.0,
            &format!(
                "{} nu on L={} N={}: {nu:.5} vs {target:.4} (tol {tol:.0e} per part), exact {:.5}, {dt:.2}s (< 30s)",
                case.name, case.l, case.n, su.nu_exact.nu
            ),
        );
    }
}

/// Branch over the default schedule at the grid of `case`; prints the slope
/// against the discrete reference pair and the continuum pair.
fn slope_line(r: &mut Report, id: &str, case: &Case, band: (f64, f64), limit: f64) -> Option<(ExpansionSetup, BifurcationBranch)> {
    let t = Instant::now();
    let Some(su) = setup(case) else {
        r.line(id, false, &format!("{}: setup failed", case.name));
        return None;
    };
    let schedule = geometric_schedule(1e-3, 0.1, 25).unwrap();
    let b = continuation(&schedule, &su.ctx, &su.data, &su.phi0_grid, &ContinuationOptions::default()).ok()?;
    let (w0h, nuh) = discrete_expansion_reference(&su.ctx, su.data.omega0, su.nu_grid.nu, &su.phi0_grid, 1e-5).ok()?;
    let dt = secs(t);
    let pts: Vec<(f64, C64)> = b.points.iter().map(|p| (p.epsilon, p.omega)).collect();
    let slope = convergence_slope(&pts, w0h, nuh).unwrap_or(f64::NAN);
    let ok = !b.truncated() && pts.len() >= 15 && slope >= band.0 && slope <= band.1 && dt < limit;
    r.line(
        id,
        ok,
        &format!(
            "{} N={}: slope {slope:.3} over {} points in [1e-3, 0.1] (band [{}, {}]), {dt:.1}s (< {limit}s)",
            case.name,
            case.n,
            pts.len(),
            band.0,
            band.1
        ),
    );
    let cont = convergence_slope(&pts, su.data.omega0, su.nu_exact.nu).unwrap_or(f64::NAN);
    r.info(id, &format!("reference omega0_h={w0h:.8} nu_h={nuh:.6}; continuum-reference slope {cont:.3}"));
    Some((su, b))
}

fn criterion5_6(r: &mut Report) {
    let pt = slope_line(r, "5a", &pt_case(17999), (1.8, 2.2), 600.0);
    slope_line(r, "5b", &npt_case(1.0, 11999), (1.8, 2.2), 600.0);
    slope_line(r, "5b-k0.7", &npt_case(0.7, 11999), (1.8, 2.2), 600.0);
    slope_line(r, "5c", &pt_case(3999), (1.7, 2.3), 60.0);
    slope_line(r, "5d", &npt_case(1.0, 3999), (1.7, 2.3), 60.0);
    slope_line(r, "5d-k0.7", &npt_case(0.7, 3999), (1.7, 2.3), 60.0);
    match pt {
        Some((_, b)) => {
            let im = b.points.iter().map(|p| p.omega.im.abs()).fold(0.0, f64::max);
            let pd = b.points.iter().map(|p| p.pt_defect).fold(0.0, f64::max);
            r.line(
                "6",
                !b.points.is_empty() && im <= 1e-8 && pd <= 1e-6,
                &format!("PT branch ({} points): max |Im omega| {im:.1e} (<= 1e-8), max pt_defect {pd:.1e} (<= 1e-6)", b.points.len()),
            );
        }
        None => r.line("6", false, "PT branch unavailable"),
    }
}

fn criterion7(r: &mut Report) {
    // PT: past 0.1 the branch bends back near eps = 0.171; 1.7167 lies just before.
    let t = Instant::now();
    if let Some(su) = setup(&pt_case(17999)) {
        let mut schedule = geometric_schedule(1e-3, 0.14, 30).unwrap();
        schedule.extend((1..=12).map(|i| 0.14 + 0.0025 * i as f64));
        let b = continuation(&schedule, &su.ctx, &su.data, &su.phi0_grid, &ContinuationOptions::default());
        if let Ok(b) = b {
            let ws: Vec<C64> = b.points.iter().map(|p| p.omega).collect();
            let dist = polyline_distance(&ws, c(1.7167, 0.0));
            let im = b.points.iter().map(|p| p.omega.im.abs()).fold(0.0, f64::max);
            let pd = b.points.iter().map(|p| p.pt_defect).fold(0.0, f64::max);
            r.line(
                "7a",
                dist <= 5e-3,
                &format!(
                    "PT branch to eps={:.4}: distance to 1.7167 is {dist:.1e} (<= 5e-3), {:.1}s",
                    b.points.last().map(|p| p.epsilon).unwrap_or(0.0),
                    secs(t)
                ),
            );
            r.line("6-ext", im <= 1e-8 && pd <= 1e-6, &format!("extended PT branch: max |Im omega| {im:.1e}, max pt_defect {pd:.1e}"));
        } else {
            r.line("7a", false, "PT continuation failed");
        }
    } else {
        r.line("7a", false, "PT setup failed");
    }
    for (id, k) in [("7b", 1.0), ("7b-k0.7", 0.7)] {
        let t = Instant::now();
        let case = npt_case(k, 11999);
        let Some(su) = setup(&case) else {
            r.line(id, false, &format!("{}: setup failed", case.name));
            continue;
        };
        let schedule = geometric_schedule(1e-3, 4.0, 80).unwrap();
        let Ok(b) = continuation(&schedule, &su.ctx, &su.data, &su.phi0_grid, &ContinuationOptions::default()) else {
            r.line(id, false, &format!("{}: continuation failed", case.name));
            continue;
        };
        let ws: Vec<C64> = b.points.iter().map(|p| p.omega).collect();
        let target = c(0.4276, -0.066);
        let dist = polyline_distance(&ws, target);
        let last = b.points.last().map(|p| (p.epsilon, p.omega)).unwrap_or((0.0, c(0.0, 0.0)));
        r.line(
            id,
            dist <= 5e-3,
            &format!(
                "{} branch: distance to 0.4276-0.066i is {dist:.1e} (<= 5e-3); last point eps={:.3} omega={:.4}, {:.1}s",
                case.name,
                last.0,
                last.1,
                secs(t)
            ),
        );
    }
}

fn jacobian_check(ctx: &FdContext, st: &BranchState, rng: &mut StdRng) -> f64 {
    let j = jacobian(st, ctx).unwrap();
    let delta = 1e-7;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let v: Vec<f64> = (0..ctx.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let jv = j.matvec(&v);
        let mut xp = st.clone();
        let mut xm = st.clone();
        for (t, vt) in v.iter().enumerate() {
            xp.dof[t] += delta * vt;
            xm.dof[t] -= delta * vt;
        }
        let rp = residual(&xp, ctx).unwrap();
        let rm = residual(&xm, ctx).unwrap();
        let num: f64 = rp.iter().zip(&rm).zip(&jv).map(|((a, b), c)| ((a - b) / (2.0 * delta) - c).powi(2)).sum();
        let den: f64 = jv.iter().map(|c| c * c).sum();
        worst = worst.max(num.sqrt() / den.sqrt());
    }
    worst
}

fn criterion8(r: &mut Report) {
    let mut rng = StdRng::seed_from_u64(20);
    let gp = pt_geometry();
    let gn = npt_geometry();
    let w_pt = eig2(1.0, &gp, Region::new(0.1, 3.0, -1.0, 1.0).unwrap(), c(OMEGA_PT, 0.0)).unwrap();
    let w_np = eig2(1.0, &gn, Region::new(0.1, 1.0, -0.5, 0.1).unwrap(), c(0.627, -0.121)).unwrap();

    // (a)
    let mut worst = 0.0f64;
    let states = [(w_pt, &gp, 0.3, 1e-3), (w_pt, &gp, 1.5, 0.05), (w_np, &gn, 0.8, 0.2)];
    for (w, g, amp, eps) in states {
        let su = ExpansionSetup::new(1.0, g, w, Grid1D::new(20.0, 201).unwrap()).unwrap();
        let u = su.phi0_grid.scale(c(amp, 0.3 * amp));
        let st = BranchState::from_field(&u, w + c(0.01, -0.02), eps);
        worst = worst.max(jacobian_check(&su.ctx, &st, &mut rng));
    }
    r.line("8a", worst <= 1e-6, &format!("Jacobian vs directional differences: worst relative error {worst:.1e} (<= 1e-6), 3 states x 10 directions"));

    // (b)
    let layer = MaterialLayer::drude(0.5, 0.7).with_chi3(c(1.0, 0.0));
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mut z = || c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let u = [z(), z(), z()];
        let w = z();
        let h = nonlinearity_h(&layer, w, u);
        for a in [0.5, 2.0] {
            let ha = nonlinearity_h(&layer, w, [u[0] * a, u[1] * a, u[2] * a]);
            for q in 0..3 {
                worst = worst.max((ha[q] - h[q] * a * a * a).norm() / (1.0 + h[q].norm() * a * a * a));
            }
        }
    }
    r.line("8b", worst <= 1e-12, &format!("h(alpha u) = alpha^3 h(u) at alpha in {{0.5, 2}}: worst {worst:.1e}"));

    // (c) and (h)
    let mut c_worst = 0.0f64;
    let mut h_worst = 0.0f64;
    let mut grid_worst = 0.0f64;
    for (k, w, g) in [(1.0, w_pt, &gp), (1.0, w_np, &gn)] {
        let su = ExpansionSetup::new(k, g, w, Grid1D::new(100.0, 3999).unwrap()).unwrap();
        let nu = su.nu_exact.nu;
        let h = h_field(g, w, &su.phi0);
        let rhs = h.add(&db_field(g, w, &su.phi0).unwrap().scale(nu));
        let scale = h.inner(&su.phi0_star).unwrap().norm();
        c_worst = c_worst.max(rhs.inner(&su.phi0_star).unwrap().norm() / scale);
        let sh = two_layer_solvability(k, w, g, &h).unwrap().norm();
        h_worst = h_worst.max(two_layer_solvability(k, w, g, &rhs).unwrap().norm() / sh);
        // with the grid nu the split trapezoid pairing vanishes as well
        let rg = h.add(&db_field(g, w, &su.phi0).unwrap().scale(su.nu_grid.nu));
        let (a, b) = (GridField::from_field(su.ctx.grid, &rg), GridField::from_field(su.ctx.grid, &su.phi0_star));
        grid_worst = grid_worst.max(a.inner(&b).norm() / scale);
    }
    r.line("8c", c_worst <= 1e-10 && grid_worst <= 1e-10, &format!("<h + nu dB phi0, phi0*> relative: exact {c_worst:.1e}, trapezoid with grid nu {grid_worst:.1e}"));
    r.line("8h", h_worst <= 1e-10, &format!("half-line solvability oracle on rhs: relative {h_worst:.1e} (<= 1e-10)"));

    // (d)
    let mut jump = 0.0f64;
    let mut res = 0.0f64;
    for (k, w, g) in [(1.0, w_pt, &gp), (1.0, w_np, &gn)] {
        let phi = eigenfunction(k, w, g).unwrap();
        jump = jump.max(phi.interface_jump());
        res = res.max(pencil_residual(k, w, g, &phi).unwrap());
    }
    r.line("8d", jump <= 1e-10 && res <= 1e-8, &format!("eigenfunction interface jump {jump:.1e} (<= 1e-10), pencil residual {res:.1e} (<= 1e-8)"));

    // (e): beta against i mu* g'(0) / (g(0) (omega + V*)) by central differences
    let (s, _) = sandwich();
    let mut worst = 0.0f64;
    for w in [1.9, 2.5, 3.09, 3.44, 4.57] {
        let b = beta3(2.0, &s, c(w, 0.0)).unwrap().value().unwrap();
        let o = beta_oracle(&s, w, 1e-6);
        worst = worst.max((b - o).norm() / b.norm().max(1.0));
    }
    r.line("8e", worst <= 1e-6, &format!("beta closed form vs derivative oracle: worst relative {worst:.1e} (<= 1e-6)"));

    // (f)
    let mut worst = 0.0f64;
    let mut count = 0;
    for i in 0..200 {
        let w = c(0.6 + 4.3 * i as f64 / 199.0, 0.0);
        let st = SandwichState::new(2.0, &s, w).unwrap();
        for m in -1..=1 {
            let Ok(d) = layer_width_dm(2.0, &s, w, m) else { continue };
            if is_real_width(d) {
                let (v, sc) = dispersion3_terms(&st, d.re);
                worst = worst.max(v.norm() / sc);
                count += 1;
            }
        }
    }
    r.line("8f", worst <= 1e-9 && count > 0, &format!("dispersion3(d_m(omega), omega) relative residual {worst:.1e} over {count} widths (<= 1e-9)"));

    // (g)
    let ns = [1999usize, 3999, 7999];
    let mut errs = Vec::new();
    for &n in &ns {
        let su = ExpansionSetup::new(1.0, &gp, w_pt, Grid1D::new(120.0, n).unwrap()).unwrap();
        let st = BranchState::from_field(&su.phi0_grid, w_pt, 1.0);
        let rv = residual(&st, &su.ctx.linearized()).unwrap();
        errs.push(rv.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    let slope = (errs[0] / errs[2]).ln() / (ns[2] as f64 / ns[0] as f64).ln();
    r.line("8g", (slope - 2.0).abs() <= 0.2, &format!("linear residual order over N={ns:?}: slope {slope:.3} (2 +- 0.2)"));
}

fn follow_sqrt(z: C64, near: C64) -> C64 {
    let r = z.sqrt();
    if (r - near).norm() <= (-r - near).norm() {
        r
    } else {
        -r
    }
}

fn beta_oracle(s: &Sandwich, w: f64, h: f64) -> C64 {
    let k = 2.0;
    let st = SandwichState::new(k, s, c(w, 0.0)).unwrap();
    let g = |l: f64| {
        let il = c(0.0, l);
        let (vm, vs, vp) = (st.vm - il, st.vs - il, st.vp - il);
        let wl = c(w, 0.0) - il;
        let mm = follow_sqrt(k * k + wl * vm, st.mum);
        let ms = follow_sqrt(k * k + wl * vs, st.mus);
        let mp = follow_sqrt(k * k + wl * vp, st.mup);
        (ms * vp - mp * vs) * (ms * vm - mm * vs) / ((ms * vp + mp * vs) * (mm * vs + ms * vm))
    };
    let dg = (g(h) - g(-h)) / (2.0 * h);
    C64::i() * st.mus * dg / (g(0.0) * (c(w, 0.0) + st.vs))
}

fn main() {
    // `cargo test` passes harness flags such as --nocapture; a name filter
    // that is not ours skips the suite.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let t = Instant::now();
    let mut r = Report { lines: Vec::new() };
    criterion1(&mut r);
    criterion2(&mut r);
    criterion3(&mut r);
    criterion4(&mut r);
    criterion5_6(&mut r);
    criterion7(&mut r);
    criterion8(&mut r);
    let failed: Vec<&str> = r.lines.iter().filter(|l| !l.1).map(|l| l.0.as_str()).collect();
    let unexpected: Vec<&str> = failed.iter().copied().filter(|id| !KNOWN_DEVIATIONS.contains(id)).collect();
    println!(
        "acceptance: {} lines, {} failed ({} known deviations, {} unexpected), {:.1}s",
        r.lines.len(),
        failed.len(),
        failed.len() - unexpected.len(),
        unexpected.len(),
        secs(t)
    );
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
