use crate::config::RunConfig;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value as Json};
use wpscat::packet_basis::{self, OperatorKind, Packet1D};
use wpscat::quadrature::{integrate_adaptive_with, QuadConfig, Region, Regularization};
use wpscat::scatter3d::{self as s3, GaussianPotential3D, KinematicDerived, Packet3D, TimeWindow};
use wpscat::stationary_scatter as st;
use wpscat::tdse_oracle as td;

pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub oracle: String,
    pub pass: bool,
}

impl Check {
    /// passes when value <= tolerance
    pub fn at_most(name: &str, value: f64, tolerance: f64, oracle: &str) -> Check {
        Check { name: name.into(), value, tolerance, oracle: oracle.into(), pass: value <= tolerance }
    }

    pub fn to_json(&self) -> Json {
        json!({"name": self.name, "value": num(self.value), "tolerance": self.tolerance, "oracle": self.oracle, "pass": self.pass})
    }
}

#[derive(Default)]
pub struct Report {
    pub results: Map<String, Json>,
    pub checks: Vec<Check>,
    pub table: Option<String>,
}

impl Report {
    fn put(&mut self, k: &str, v: Json) {
        self.results.insert(k.to_string(), v);
    }
}

/// non-finite numbers become null
pub fn num(x: f64) -> Json {
    if x.is_finite() {
        json!(x)
    } else {
        Json::Null
    }
}

fn cplx(z: C64) -> Json {
    json!({"re": num(z.re), "im": num(z.im)})
}

pub fn csv_num(x: f64) -> String {
    format!("{x:.16e}")
}

type Res = Result<Report, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn run(cfg: &RunConfig) -> Res {
    match cfg.command {
        "overlap" => overlap(cfg),
        "matrix" => matrix(cfg),
        "assoc" => assoc(cfg),
        "stationary" => stationary(cfg),
        "scatter" => scatter(cfg),
        "oracle" => oracle(cfg),
        "sweep" => sweep(cfg),
        "selftest-erf" => selftest_erf(cfg),
        other => Err(format!("no such command {other}")),
    }
}

const HERMITIAN_OPS: &[OperatorKind] = &[
    OperatorKind::X,
    OperatorKind::X2,
    OperatorKind::P,
    OperatorKind::P2,
    OperatorKind::PowX(3),
    OperatorKind::PowP(3),
    OperatorKind::DeltaAt0,
    OperatorKind::OnePlusP,
    OperatorKind::PlaneWave(0.7),
];

fn overlap(c: &RunConfig) -> Res {
    let s1 = c.real("sigma");
    let s2 = c.auto_real("sigma2").unwrap_or(s1);
    let a = Packet1D::new(s1, c.real("p1"), c.real("x1")).map_err(err)?;
    let b = Packet1D::new(s2, c.real("p2"), c.real("x2")).map_err(err)?;
    let ov = packet_basis::overlap_general(&a, &b);
    let mut r = Report::default();
    r.put("overlap", cplx(ov));
    r.put("abs", num(ov.norm()));

    let mut rng = ChaCha8Rng::seed_from_u64(c.count("seed") as u64);
    let (mut max_abs, mut self_def, mut herm): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..c.count("pairs") {
        let sa = rng.gen_range(0.3..3.0);
        let pa = Packet1D::new(sa, rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)).map_err(err)?;
        let pb = Packet1D::new(sa, rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)).map_err(err)?;
        let pc = Packet1D::new(rng.gen_range(0.3..3.0), pb.p0, pb.x0).map_err(err)?;
        max_abs = max_abs.max(packet_basis::overlap(&pa, &pb).map_err(err)?.norm());
        max_abs = max_abs.max(packet_basis::overlap_general(&pa, &pc).norm());
        self_def = self_def.max((packet_basis::overlap(&pa, &pa).map_err(err)? - 1.0).norm());
        for &op in HERMITIAN_OPS {
            herm = herm.max(packet_basis::hermiticity_defect(op, &pa, &pb).map_err(err)?);
        }
    }
    r.put("max_abs_overlap", num(max_abs));
    r.checks.push(Check::at_most("max |overlap|", max_abs, 1.0 + 1e-14, "Cauchy-Schwarz"));
    r.checks.push(Check::at_most("|<a|a> - 1|", self_def, 1e-13, "normalisation"));
    r.checks.push(Check::at_most("hermiticity defect", herm, 1e-12, "<a|O|b> = <b|O|a>^*"));
    if a.sigma == b.sigma {
        let cc = packet_basis::CompletenessConfig {
            quad: QuadConfig { tol_abs: c.real("tol"), tol_rel: 0.0, max_evals: 2_000_000 },
            ..Default::default()
        };
        let comp = packet_basis::resolve_identity(&b, &a, &cc).map_err(err)?;
        r.put("completeness", cplx(comp.value));
        r.checks.push(Check::at_most(
            "completeness reconstruction",
            (comp.value - comp.reference).norm(),
            1e-8,
            "phase-space integral against closed-form overlap",
        ));
    }
    Ok(r)
}

fn matrix(c: &RunConfig) -> Res {
    let sigma = c.real("sigma");
    let ops: Vec<OperatorKind> =
        c.text("ops").split(',').map(|s| OperatorKind::parse(s.trim())).collect::<Result<_, _>>().map_err(err)?;
    let (ps, xs) = (c.list("p-values"), c.list("x-values"));
    let mut csv = String::from("op,P1,X1,P2,X2,re,im\n");
    let mut worst: f64 = 0.0;
    let mut rows = 0usize;
    for op in &ops {
        for &p1 in &ps {
            for &x1 in &xs {
                for &p2 in &ps {
                    for &x2 in &xs {
                        let a = Packet1D::new(sigma, p1, x1).map_err(err)?;
                        let b = Packet1D::new(sigma, p2, x2).map_err(err)?;
                        let m = packet_basis::matrix_element(*op, &a, &b).map_err(err)?;
                        worst = worst.max(packet_basis::hermiticity_defect(*op, &a, &b).map_err(err)?);
                        csv.push_str(&format!(
                            "{},{},{},{},{},{},{}\n",
                            op.name(),
                            csv_num(p1),
                            csv_num(x1),
                            csv_num(p2),
                            csv_num(x2),
                            csv_num(m.re),
                            csv_num(m.im)
                        ));
                        rows += 1;
                    }
                }
            }
        }
    }
    let mut r = Report::default();
    r.put("rows", json!(rows));
    r.checks.push(Check::at_most("hermiticity defect", worst, 1e-12, "<a|O|b> = <b|O^dagger|a>^*"));
    r.table = Some(csv);
    Ok(r)
}

fn assoc(c: &RunConfig) -> Res {
    let k = c.real("k");
    let pot = match c.text("potential") {
        "free" => st::AssocPotential::Free,
        "linear" => st::AssocPotential::Linear { c: c.real("c") },
        "delta" => st::AssocPotential::Delta { g: c.real("g") },
        _ => st::AssocPotential::SquareWell(st::SquareWell::new(c.real("depth"), c.real("a"), c.real("b")).map_err(err)?),
    };
    let reg = Regularization::new(c.list("eps"), 2).map_err(err)?;
    let rep = st::associativity_report(k, pot, &reg).map_err(err)?;
    let mut r = Report::default();
    r.put("potential", json!(pot.name()));
    r.put("k", num(k));
    r.put("g", num(pot.strength()));
    r.put("delta1", cplx(rep.delta1));
    r.put("delta2", cplx(rep.delta2));
    r.put("delta2_commutator_form", cplx(rep.delta2_commutator_form));
    r.put("verdict", json!(rep.verdict.as_str()));
    r.put("error_bounds", json!([num(rep.error_bounds[0]), num(rep.error_bounds[1])]));
    match pot {
        st::AssocPotential::Delta { g } => {
            let d1 = st::delta1_closed_form(g, k);
            let d2 = st::delta2_closed_form(g, k);
            let rel = |x: C64, y: C64| (x - y).norm() / y.norm().max(1e-300);
            r.checks.push(Check::at_most("delta1 relative error", rel(rep.delta1, d1), 1e-3, "-2ig^2k^2/(g^2+k^2)"));
            r.checks.push(Check::at_most("delta2 relative error", rel(rep.delta2, d2), 1e-3, "-2ig^2k^2(1+2k^2)/(g^2+k^2)"));
        }
        st::AssocPotential::Free | st::AssocPotential::Linear { .. } => {
            r.checks.push(Check::at_most("|delta1|", rep.delta1.norm(), 1e-9, "associative algebra"));
            r.checks.push(Check::at_most("|delta2|", rep.delta2.norm(), 1e-9, "associative algebra"));
        }
        st::AssocPotential::SquareWell(_) => {}
    }
    // delta_r(eps) samples for the stationary potentials
    let spot = match pot {
        st::AssocPotential::Free => Some(st::Potential::Free),
        st::AssocPotential::Delta { g } => Some(st::Potential::Delta(st::DeltaPotential { g })),
        st::AssocPotential::SquareWell(w) => Some(st::Potential::SquareWell(w)),
        st::AssocPotential::Linear { .. } => None,
    };
    let mut csv = String::from("eps,delta_r_re,delta_r_im,closed_re,closed_im\n");
    if let Some(sp) = spot {
        let k2 = c.real("k2");
        let sp_res = st::scalar_product_regularized(sp, k, k2, &reg).map_err(err)?;
        for &(eps, d) in &sp_res.delta_r {
            let closed = match sp {
                st::Potential::Delta(dp) => st::delta_r_closed_form(dp.g, k, k2, eps),
                st::Potential::Free => C64::new(0.0, 0.0),
                _ => C64::new(f64::NAN, f64::NAN),
            };
            csv.push_str(&format!("{},{},{},{},{}\n", csv_num(eps), csv_num(d.re), csv_num(d.im), csv_num(closed.re), csv_num(closed.im)));
        }
        r.put("delta_r_exponent", num(sp_res.exponent));
        r.put("k2", num(k2));
    }
    r.table = Some(csv);
    Ok(r)
}

fn stationary_potential(c: &RunConfig) -> Result<st::Potential, String> {
    Ok(match c.text("potential") {
        "free" => st::Potential::Free,
        "delta" => st::Potential::Delta(st::DeltaPotential { g: c.real("g") }),
        _ => st::Potential::SquareWell(st::SquareWell::new(c.real("depth"), c.real("a"), c.real("b")).map_err(err)?),
    })
}

fn stationary(c: &RunConfig) -> Res {
    let pot = stationary_potential(c)?;
    let k = c.real("k");
    let s = st::StationaryState::new(pot, k).map_err(err)?;
    let pkt = Packet1D::new(c.real("sigma"), c.real("p"), c.real("x")).map_err(err)?;
    let proj = st::packet_projection(&s, &pkt).map_err(err)?;
    // direct x-quadrature of <P,X|psi_k>
    let w = 12.0 * pkt.sigma.sqrt();
    let region = Region::new(vec![pkt.x0 - w], vec![pkt.x0 + w]).map_err(err)?;
    let tol = c.real("tol");
    let q = integrate_adaptive_with(
        |x: &[f64]| packet_basis::position_amplitude(&pkt, x[0]).conj() * s.wavefunction(x[0]),
        &region,
        &QuadConfig { tol_abs: tol, tol_rel: 0.0, max_evals: 1_000_000 },
    )
    .map_err(err)?;
    let mut r = Report::default();
    r.put("R", cplx(s.r));
    r.put("T", cplx(s.t));
    r.put("projection", cplx(proj));
    r.put("projection_sgn_part", cplx(st::packet_projection_sgn_part(&s, &pkt).map_err(err)?));
    r.checks.push(Check::at_most("flux defect |R|^2 + |T|^2 - 1", st::flux_defect(s.r, s.t), 1e-13, "current conservation"));
    r.checks.push(Check::at_most("projection vs x-quadrature", (proj - q.value).norm(), 1e-8, "adaptive x-quadrature"));
    Ok(r)
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// |P| (0.6 e1 + 0.8 P/|P|) with e1 perpendicular to P
fn default_golden_p(p: [f64; 3]) -> [f64; 3] {
    let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    let e3 = unit(p);
    let helper = if e3[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = unit(cross(cross(e3, helper), e3));
    [0, 1, 2].map(|i| n * (0.6 * e1[i] + 0.8 * e3[i]))
}

fn scatter(c: &RunConfig) -> Res {
    let initial = Packet3D::new(c.real("sigma-e"), c.vec3("p-initial"), c.vec3("x-initial"), c.real("t0")).map_err(err)?;
    let pot = GaussianPotential3D::new(c.real("g"), c.real("sigma-v"), c.vec3("x-v")).map_err(err)?;
    let window = TimeWindow::new(c.real("t0"), c.real("t1")).map_err(err)?;
    let order: usize = c.text("order").parse().unwrap_or(2);
    let region = match c.text("region") {
        "on" => s3::Region3::OnAxis,
        "off" => s3::Region3::OffAxis,
        _ => s3::Region3::All,
    };
    let lcfg = s3::LadderConfig { n_p: c.count("grid"), ..Default::default() };
    let mut r = Report::default();

    let p0 = s3::total_probability(s3::Order::P0, &initial, &pot, &window, &lcfg).map_err(err)?;
    r.put("P0_total", num(p0.value));
    r.checks.push(Check::at_most("|P0 - 1|", (p0.value - 1.0).abs(), 1e-6, "norm of the free final states"));
    let (mut p1v, mut resid) = (Json::Null, Json::Null);
    if order >= 1 {
        let p1 = s3::total_probability(s3::Order::P1, &initial, &pot, &window, &lcfg).map_err(err)?;
        p1v = num(p1.value);
        r.put("P1_abs_scale", num(p1.abs_scale));
        r.checks.push(Check::at_most("|P1| / sum |dP1|", p1.value.abs() / p1.abs_scale, 1e-4, "total first-order probability vanishes"));
    }
    if order >= 2 {
        let p2 = s3::total_probability(s3::Order::P2, &initial, &pot, &window, &lcfg).map_err(err)?;
        resid = num(p2.unitarity_residual);
        r.put("sum_abs_S1_sq", num(p2.s1_sq));
        r.put("sum_2Re_S0_S2", num(p2.s0_s2));
        r.put("time_error", num(p2.time_error));
        r.checks.push(Check::at_most(
            "unitarity residual",
            p2.unitarity_residual,
            2e-2,
            "sum(S0 S2^* + c.c.) = -sum |S1|^2",
        ));
    }
    r.put("P1_total", p1v);
    r.put("unitarity_residual", resid);

    // bulk golden-rule rate over five windows sharing the centre
    let pf = c.auto_vec3("golden-p").unwrap_or_else(|| default_golden_p(initial.p));
    let mid = 0.5 * (window.t0 + window.t1);
    let lens: Vec<f64> = (0..5).map(|i| window.length() * (0.6 + 0.1 * i as f64)).collect();
    let mut gr = Vec::new();
    for &l in &lens {
        let w = TimeWindow::new(mid - 0.5 * l, mid + 0.5 * l).map_err(err)?;
        gr.push(s3::golden_rule_bulk(&initial, pf, initial.sigma, &pot, &w).map_err(err)?);
    }
    // least-squares line through (L, P); a constant rate leaves no residual
    let (lm, pm) = (lens.iter().sum::<f64>() / 5.0, gr.iter().sum::<f64>() / 5.0);
    let sxy: f64 = lens.iter().zip(&gr).map(|(l, p)| (l - lm) * (p - pm)).sum();
    let sxx: f64 = lens.iter().map(|l| (l - lm) * (l - lm)).sum();
    let slope = sxy / sxx;
    let rms = (lens.iter().zip(&gr).map(|(l, p)| (p - pm - slope * (l - lm)).powi(2)).sum::<f64>() / 5.0).sqrt();
    r.put("golden_rule_slope", num(slope));
    r.put("golden_rule_fit_rms", num(rms));
    r.put("golden_rule_window_lengths", json!(lens));
    r.put("golden_rule_p_final", json!(pf));

    let grid = s3::FinalGrid::around(&initial, &window, c.count("table"), c.count("table-x"));
    let table = s3::distributions(&initial, &pot, &window, &grid, region, c.count("bins")).map_err(err)?;
    let (t0, t1, t2) = table.totals();
    r.put("table_rows", json!(table.rows.len()));
    r.put("table_totals", json!({"dP0": num(t0), "dP1": num(t1), "dP2": num(t2)}));
    if region == s3::Region3::OnAxis {
        let neg = table.rows.iter().filter(|row| row.dp0 + row.dp1 < 0.0).count();
        r.checks.push(Check::at_most("rows with dP0 + dP1 < 0", neg as f64, 0.0, "pointwise positivity on axis"));
    }
    r.table = Some(table.to_csv());
    Ok(r)
}

fn oracle(c: &RunConfig) -> Res {
    let (g, k0) = (c.real("g"), c.real("k0"));
    let w = c.auto_real("w").unwrap_or(0.02 / k0);
    let pot = match c.text("potential") {
        "delta" => td::Potential1D::Delta { g, w, x0: 0.0 },
        "gaussian" => td::Potential1D::Gaussian { g, sigma_v: c.real("sigma-v"), x_v: 0.0 },
        _ => td::Potential1D::Zero,
    };
    let ext = c.real("extent");
    let mut grid = td::Grid1D::at_safety_limit(c.count("points"), -ext, ext).map_err(err)?;
    if c.text("edges") == "absorbing" {
        grid = grid.with_edges(td::Edges::Absorbing { width: 0.1 * ext, strength: 20.0 });
    }
    let cfg = td::RtConfig { grid, x_start: c.real("x-start"), ..Default::default() };
    let (res, state) = td::reflection_transmission_with_state(k0, c.real("dk"), &pot, 0.0, &cfg).map_err(err)?;
    let mut r = Report::default();
    r.put("R_prob", num(res.r_prob));
    r.put("T_prob", num(res.t_prob));
    r.put("norm_drift", num(res.norm_drift));
    r.put(
        "params",
        json!({
            "potential": c.text("potential"), "g": g, "k0": k0, "dk": c.real("dk"), "w": w,
            "sigma": res.sigma, "t_final": res.t_final, "steps": res.steps,
            "n_points": grid.n_points, "dx": grid.dx(), "dt": grid.dt, "edges": grid.edges.name(),
        }),
    );
    r.put("interior_probability", num(res.interior));
    r.checks.push(Check::at_most("|R + T - 1|", (res.r_prob + res.t_prob - 1.0).abs(), 1e-6, "norm conservation"));
    match pot {
        td::Potential1D::Delta { .. } => {
            let exact = g * g / (g * g + k0 * k0);
            r.put("R_closed_form", num(exact));
            r.checks.push(Check::at_most("|R_prob - |R(k0)|^2|", (res.r_prob - exact).abs(), 0.02, "g^2/(g^2+k0^2)"));
        }
        td::Potential1D::Zero => {
            r.checks.push(Check::at_most("|T_prob - 1|", (res.t_prob - 1.0).abs(), 1e-6, "free motion"));
        }
        _ => {}
    }
    if c.text("snapshot") == "true" {
        r.table = Some(state.to_csv());
    }
    Ok(r)
}

fn sweep(c: &RunConfig) -> Res {
    let n = c.count("points");
    let param = c.text("param");
    let (d_from, d_to) = match param {
        "delta-omega" => (-3.0, 3.0),
        "k" => (0.05, 5.0),
        _ => (4.0, 12.0),
    };
    let (from, to) = (c.auto_real("from").unwrap_or(d_from), c.auto_real("to").unwrap_or(d_to));
    let xs: Vec<f64> = (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect();
    let mut r = Report::default();
    let (header, rows): (&str, Vec<Result<Vec<f64>, String>>) = match param {
        "delta-omega" => {
            let window = TimeWindow::new(c.real("t0"), c.real("t1")).map_err(err)?;
            let (sig, tint) = (c.real("sigma-t"), c.real("t-int"));
            let rows = wpscat::par::map_indexed(n, |i| {
                let kin = KinematicDerived {
                    sigma_s: 1.0,
                    sigma_t: sig,
                    v0: [0.0; 3],
                    delta_p: [0.0; 3],
                    delta_e: 0.0,
                    delta_omega: xs[i],
                    t_int: tint,
                    r_traj: 0.0,
                    theta0: 0.0,
                    sigma_s_prime: 1.0,
                    phase: 0.0,
                };
                let t = s3::g_time_integral(&kin, &window).map_err(err)?;
                Ok(vec![xs[i], s3::q1(tint, &window, sig, xs[i]), t.a_bulk.norm(), t.b_boundary.norm(), t.g.norm()])
            });
            ("delta_omega,q1,abs_a_bulk,abs_b_boundary,abs_g", rows)
        }
        "k" => {
            let g = c.real("g");
            let rows = wpscat::par::map_indexed(n, |i| {
                let (rr, tt) = st::reflection_transmission(st::DeltaPotential { g }, xs[i]).map_err(err)?;
                Ok(vec![xs[i], rr.norm_sqr(), tt.norm_sqr(), st::flux_defect(rr, tt)])
            });
            ("k,R2,T2,flux_defect", rows)
        }
        _ => {
            let a = Packet3D::new(1.0, [0.0, 0.0, 1.0], [0.0, 0.0, -30.0], 0.0).map_err(err)?;
            let pot = GaussianPotential3D::new(1.0, 1e4, [0.0; 3]).map_err(err)?;
            let rows = wpscat::par::map_indexed(n, |i| {
                let w = TimeWindow::new(30.0 - 0.5 * xs[i], 30.0 + 0.5 * xs[i]).map_err(err)?;
                Ok(vec![xs[i], s3::golden_rule_bulk(&a, [0.6, 0.0, 0.8], 1.0, &pot, &w).map_err(err)?])
            });
            ("window_length,golden_rule_bulk", rows)
        }
    };
    let mut csv = format!("{header}\n");
    let mut finite = true;
    for row in rows {
        let row = row?;
        finite &= row.iter().all(|v| v.is_finite());
        csv.push_str(&row.iter().map(|v| csv_num(*v)).collect::<Vec<_>>().join(","));
        csv.push('\n');
    }
    let monotone = xs.windows(2).all(|w| w[1] > w[0]);
    r.put("rows", json!(n));
    r.put("param", json!(param));
    r.checks.push(Check::at_most("non-monotone parameter steps", if monotone { 0.0 } else { 1.0 }, 0.0, "construction"));
    r.checks.push(Check::at_most("non-finite entries", if finite { 0.0 } else { 1.0 }, 0.0, "construction"));
    r.table = Some(csv);
    Ok(r)
}

fn selftest_erf(c: &RunConfig) -> Res {
    use wpscat::special_fn::{erf_complex, faddeeva};
    let n = c.count("points");
    let (r0, r1, i0, i1) = (c.real("re-min"), c.real("re-max"), c.real("im-min"), c.real("im-max"));
    let mut csv = String::from("z_re,z_im,erf_re,erf_im,w_re,w_im\n");
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let z = C64::new(r0 + (r1 - r0) * a as f64 / (n - 1) as f64, i0 + (i1 - i0) * b as f64 / (n - 1) as f64);
            let e = erf_complex(z).map_err(err)?;
            let w = faddeeva(z).map_err(err)?;
            // erf z = 1 - e^{-z^2} w(iz)
            let wi = faddeeva(C64::i() * z).map_err(err)?;
            let alt = 1.0 - (-z * z).exp() * wi;
            worst = worst.max((e - alt).norm() / e.norm().max(1.0));
            csv.push_str(&format!("{},{},{},{},{},{}\n", csv_num(z.re), csv_num(z.im), csv_num(e.re), csv_num(e.im), csv_num(w.re), csv_num(w.im)));
        }
    }
    let mut r = Report::default();
    r.put("rows", json!(n * n));
    r.checks.push(Check::at_most("|erf z - (1 - e^{-z^2} w(iz))| / max(1, |erf z|)", worst, 1e-10, "erf/Faddeeva identity"));
    r.table = Some(csv);
    Ok(r)
}
