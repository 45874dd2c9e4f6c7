use bisqueeze::analysis::{identity_resolution_residual, radius_report, RadiusAgreement};
use bisqueeze::deformations::{biorthogonality_matrix, ladder_residuals, BasisVector, DeformationModel, ModelKind};
use bisqueeze::dynamics::{
    capital_ops_analytic, capital_ops_numeric, field_quadrature_profile, number_matrix_elements,
    quadrature_variance_product, squeeze_hamiltonian_identification, DynamicsParams,
};
use bisqueeze::export::{Cell, Table};
use bisqueeze::numerics::{FockVector, QuadratureSpec, TAIL_TOL};
use bisqueeze::operators::SqueezeParams;
use bisqueeze::states::{bi_squeezed, bi_squeezed_agreement, coherent_bi_squeezed, Construction};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{TaskSpec, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Flagged,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub identity: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Reported only; does not enter the task status.
    pub informational: bool,
}

impl Check {
    fn new(name: &str, identity: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            identity: identity.into(),
            value,
            tolerance,
            pass: value <= tolerance,
            informational: false,
        }
    }

    fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

/// Everything one task produced. Holds no timing data.
#[derive(Debug, Clone, Serialize)]
pub struct TaskOutcome {
    pub task: String,
    pub identity: String,
    pub status: Status,
    pub checks: Vec<Check>,
    pub diagnostics: Value,
    /// Scalar outputs collected by `scan`, in a fixed order.
    pub scalars: Vec<(String, f64)>,
    pub error: Option<String>,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl TaskOutcome {
    fn finish(
        task: &str,
        identity: &str,
        checks: Vec<Check>,
        flagged: bool,
        diagnostics: Value,
        scalars: Vec<(String, f64)>,
        table: Table,
    ) -> Self {
        let failed = checks.iter().any(|c| !c.informational && !c.pass);
        let status = if failed {
            Status::Fail
        } else if flagged {
            Status::Flagged
        } else {
            Status::Pass
        };
        Self {
            task: task.into(),
            identity: identity.into(),
            status,
            checks,
            diagnostics,
            scalars,
            error: None,
            table: Some(table),
        }
    }

    pub fn failed(task: &str, error: String) -> Self {
        Self {
            task: task.into(),
            identity: identity_of(task).into(),
            status: Status::Fail,
            checks: Vec::new(),
            diagnostics: Value::Null,
            scalars: Vec::new(),
            error: Some(error),
            table: None,
        }
    }
}

pub fn identity_of(task: &str) -> &'static str {
    match task {
        "validate" => "<phi_n, Psi_m> = delta_nm and the ladder relations b phi_n = sqrt(n+1) phi_(n+1), a phi_n = sqrt(n) phi_(n-1)",
        "states" => "<tau_z, kappa_z> = 1 for the bi-squeezed pair, with construction agreement",
        "radius" => "ratio-test radius of the bi-squeezed series vs atanh(q^-1) and atanh(q^-2)",
        "dynamics" => "<Psi_0, N(t) phi_0> = sinh^2(2 Lambda t) and exp(-iH) = S(-2 Lambda)",
        "identity" => "(1/pi) int <f, tau_z^alpha> <kappa_z^alpha, g> d^2 alpha = <f, g>",
        _ => "unknown",
    }
}

fn checks_table(checks: &[Check]) -> Table {
    let mut t = Table::new(["check", "identity", "value", "tolerance", "pass", "informational"]);
    for c in checks {
        t.push(vec![
            c.name.as_str().into(),
            c.identity.as_str().into(),
            c.value.into(),
            c.tolerance.into(),
            c.pass.into(),
            c.informational.into(),
        ])
        .expect("fixed width");
    }
    t
}

fn precision_degraded(model: &DeformationModel) -> bool {
    matches!(model.kind(), ModelKind::Swanson(d) if d.precision_degraded)
}

pub fn run_task(model: &DeformationModel, task: &TaskSpec, tol: &Tolerances) -> TaskOutcome {
    let name = task.name();
    let result = match task {
        TaskSpec::Validate { nmax } => validate(model, *nmax, tol),
        TaskSpec::States { r, theta, alpha } => states(model, *r, *theta, C64::new(alpha[0], alpha[1]), tol),
        TaskSpec::Radius {} => radius(model, tol),
        TaskSpec::Dynamics { lambda, omega, times, ode_tol, identification_lambda } => dynamics(
            model,
            *omega,
            *lambda,
            times,
            *ode_tol,
            identification_lambda.unwrap_or(*lambda),
            tol,
        ),
        TaskSpec::Identity { r, theta, cutoff_radius, radial_order, angular_order } => identity(
            model,
            SqueezeParams::from_polar(*r, *theta),
            QuadratureSpec::polar(*radial_order, *angular_order, *cutoff_radius),
            tol,
        ),
    };
    result.unwrap_or_else(|e| TaskOutcome::failed(name, e.to_string()))
}

type TaskResult = bisqueeze::Result<TaskOutcome>;

fn validate(model: &DeformationModel, nmax: usize, tol: &Tolerances) -> TaskResult {
    let count = (nmax + 1).min(model.dim());
    let gram = biorthogonality_matrix(model, count)?;
    let lad = ladder_residuals(model, count)?;
    let checks = vec![
        Check::new("biorthogonality", "<phi_n, Psi_m> = delta_nm", gram.max_deviation, tol.biorthogonality),
        Check::new("b_phi", "b phi_n = sqrt(n+1) phi_(n+1)", lad.b_phi, tol.ladder),
        Check::new("a_phi", "a phi_n = sqrt(n) phi_(n-1)", lad.a_phi, tol.ladder),
        Check::new("a_dag_psi", "a^dag Psi_n = sqrt(n+1) Psi_(n+1)", lad.a_dag_psi, tol.ladder),
        Check::new("b_dag_psi", "b^dag Psi_n = sqrt(n) Psi_(n-1)", lad.b_dag_psi, tol.ladder),
    ];
    let table = checks_table(&checks);
    let scalars = vec![("biorthogonality".into(), gram.max_deviation), ("ladder".into(), lad.max())];
    let diagnostics = json!({ "nmax": count - 1, "flagged_rows": gram.flagged_rows });
    Ok(TaskOutcome::finish(
        "validate",
        identity_of("validate"),
        checks,
        precision_degraded(model),
        diagnostics,
        scalars,
        table,
    ))
}

fn state_table(left: &BasisVector, right: &BasisVector) -> bisqueeze::Result<Table> {
    let mut t;
    match (left, right) {
        (BasisVector::Fock(l), BasisVector::Fock(r)) => {
            t = Table::new(["n", "tau_re", "tau_im", "kappa_re", "kappa_im"]);
            for (n, (a, b)) in l.as_slice().iter().zip(r.as_slice()).enumerate() {
                t.push(vec![Cell::from(n), a.re.into(), a.im.into(), b.re.into(), b.im.into()])?;
            }
        }
        (BasisVector::Grid(l), BasisVector::Grid(r)) => {
            t = Table::new(["x", "tau_re", "tau_im", "kappa_re", "kappa_im"]);
            for ((x, a), b) in l.grid().nodes().iter().zip(l.values()).zip(r.values()) {
                t.push(vec![(*x).into(), a.re.into(), a.im.into(), b.re.into(), b.im.into()])?;
            }
        }
        _ => return Err(bisqueeze::Error::RepresentationMismatch("pair spans two representations")),
    }
    Ok(t)
}

fn states(model: &DeformationModel, r: f64, theta: f64, alpha: C64, tol: &Tolerances) -> TaskResult {
    let p = SqueezeParams::from_polar(r, theta);
    let pair = bi_squeezed(model, &p, Construction::Series)?;
    let pairing_dev = (pair.pairing - C64::new(1.0, 0.0)).norm();
    let mut checks = vec![Check::new("pairing", "<tau_z, kappa_z> = 1", pairing_dev, tol.states)];
    let mut scalars = vec![
        ("pairing_re".to_string(), pair.pairing.re),
        ("pairing_im".to_string(), pair.pairing.im),
        ("pairing_deviation".to_string(), pairing_dev),
    ];
    let mut diagnostics = json!({ "series": pair.diagnostics });
    if model.is_regular() {
        let agree = bi_squeezed_agreement(model, &p)?;
        checks.push(Check::new(
            "constructions",
            "T S(z) e0 = S_cal(z) phi_0 = series",
            agree.max_residual(),
            tol.states,
        ));
        let cb = coherent_bi_squeezed(model, alpha, &p)?;
        checks.push(Check::new(
            "annihilation",
            "[cosh r (a - alpha) + e^(i theta) sinh r (b - conj alpha)] tau = 0 and mirror",
            cb.vacuum_residual.max(cb.mirror_residual),
            tol.states,
        ));
        checks.push(Check::new(
            "eigen",
            "(a + zeta b) tau = (alpha + zeta conj alpha) tau, zeta = e^(i theta) tanh r",
            cb.eigen_residual,
            tol.states,
        ));
        checks.push(Check::new("coherent_pairing", "<tau_z^alpha, kappa_z^alpha> = 1", cb.pairing_residual, tol.states));
        checks.push(
            Check::new("eigen_as_written", "(a + z b) tau = alpha tau", cb.literal_eigen_residual, tol.states)
                .informational(),
        );
        scalars.push(("construction_residual".into(), agree.max_residual()));
        scalars.push(("coherent_residual".into(), cb.max_residual()));
        diagnostics["route_residual"] = json!(cb.route_residual);
    }
    // a series cut by the basis size only matters if its last term is still visible
    let scale = TAIL_TOL * pair.left.norm();
    let flagged = !pair.is_converged()
        || pair.diagnostics.is_some_and(|d| !d.stopped_by_rule && d.last_term_norm > scale)
        || precision_degraded(model);
    let table = state_table(&pair.left, &pair.right)?;
    Ok(TaskOutcome::finish("states", identity_of("states"), checks, flagged, diagnostics, scalars, table))
}

fn radius(model: &DeformationModel, tol: &Tolerances) -> TaskResult {
    let rep = radius_report(model)?;
    let unbounded = rep.rho_empirical.is_infinite() && rep.rho_theoretical.is_infinite();
    let theorem = unbounded || rep.deviation_theoretical <= tol.radius;
    let displayed = rep.deviation_displayed_form <= tol.radius;
    let agreement = match (theorem, displayed) {
        (true, false) => RadiusAgreement::Theorem,
        (false, true) => RadiusAgreement::DisplayedForm,
        (true, true) => RadiusAgreement::Both,
        (false, false) => RadiusAgreement::Neither,
    };
    let best = if unbounded { 0.0 } else { rep.deviation_theoretical.min(rep.deviation_displayed_form) };
    let checks = vec![
        Check::new("empirical_vs_closed_form", "rho_empirical matches one closed form", best, tol.radius),
        Check::new("theorem_form", "rho = atanh(q^-1)", if unbounded { 0.0 } else { rep.deviation_theoretical }, tol.radius)
            .informational(),
        Check::new("displayed_form", "rho = atanh(q^-2)", rep.deviation_displayed_form, tol.radius).informational(),
    ];
    let flagged = agreement == RadiusAgreement::Both && !unbounded;
    let empirical = bisqueeze::analysis::convergence_radius_empirical(model, 0.0)?;
    let mut table = Table::new(["k", "ratio"]);
    for (k, x) in empirical.trace.iter().enumerate() {
        table.push(vec![Cell::from(k), (*x).into()])?;
    }
    let scalars = vec![
        ("rho_empirical".into(), rep.rho_empirical),
        ("rho_theoretical".into(), rep.rho_theoretical),
        ("rho_displayed_form".into(), rep.rho_displayed_form),
    ];
    let diagnostics = json!({ "report": rep, "agreement": agreement });
    Ok(TaskOutcome::finish("radius", identity_of("radius"), checks, flagged, diagnostics, scalars, table))
}

#[allow(clippy::too_many_arguments)]
fn dynamics(
    model: &DeformationModel,
    omega: f64,
    lambda: f64,
    times: &[f64],
    ode_tol: f64,
    id_lambda: f64,
    tol: &Tolerances,
) -> TaskResult {
    if times.is_empty() {
        return Err(bisqueeze::Error::Domain("dynamics task needs at least one time".into()));
    }
    let base = DynamicsParams::new(omega, lambda, 0.0)?;
    let rows = times
        .par_iter()
        .map(|&t| {
            let p = DynamicsParams { t, ..base };
            Ok((p, number_matrix_elements(model, &p)?, quadrature_variance_product(model, &p)?))
        })
        .collect::<bisqueeze::Result<Vec<_>>>()?;
    let mut table = Table::new([
        "t",
        "psi_phi_re",
        "psi_phi_im",
        "sinh2",
        "phi_phi_re",
        "phi_phi_im",
        "phi_phi_expected_re",
        "phi_phi_expected_im",
        "adjoint_re",
        "adjoint_im",
        "var_plus_re",
        "var_minus_re",
        "variance_product",
        "heisenberg_bound",
        "amp_plus",
        "amp_minus",
        "flagged",
    ]);
    let (mut element, mut phi_phi, mut adjoint, mut saturation, mut stated): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut flagged = false;
    for (p, el, var) in &rows {
        let field = field_quadrature_profile(p, &[0.0]);
        table.push(vec![
            p.t.into(),
            el.psi_phi.re.into(),
            el.psi_phi.im.into(),
            el.psi_phi_expected.into(),
            el.phi_phi.re.into(),
            el.phi_phi.im.into(),
            el.phi_phi_expected.re.into(),
            el.phi_phi_expected.im.into(),
            el.adjoint.re.into(),
            el.adjoint.im.into(),
            var.var_plus.re.into(),
            var.var_minus.re.into(),
            var.product.into(),
            var.heisenberg_bound.into(),
            field[0].amp_plus.into(),
            field[0].amp_minus.into(),
            var.flagged.into(),
        ])?;
        element = element.max(el.psi_phi_residual());
        phi_phi = phi_phi.max(el.phi_phi_residual());
        adjoint = adjoint.max(el.adjoint_residual());
        saturation = saturation.max((var.product - var.heisenberg_bound).abs());
        stated = stated.max((var.product - 0.5).abs());
        flagged |= var.flagged;
    }
    let t_far = times.iter().copied().fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a });
    let far = DynamicsParams { t: t_far, ..base };
    let ode = capital_ops_numeric(model, &far, ode_tol)?;
    let ode_dev = ode.ops.max_deviation(&capital_ops_analytic(model, &far)?);
    let id = squeeze_hamiltonian_identification(model, id_lambda)?;
    let best = id.best_pairing().clone();
    let checks = vec![
        Check::new("number_element", "<Psi_0, B(t)A(t) phi_0> = sinh^2(2 Lambda t)", element, tol.dynamics),
        Check::new(
            "phi_phi_element",
            "<phi_0, B(t)A(t) phi_0> = ||phi_0||^2 sinh^2 + <phi_0, b^2 phi_0> sinh cosh",
            phi_phi,
            tol.dynamics,
        ),
        Check::new("adjoint_element", "<phi_0, N(t)^dag Psi_0> = sinh^2(2 Lambda t)", adjoint, tol.dynamics),
        Check::new("ode_vs_analytic", "numeric capital operators = analytic", ode_dev, 10.0 * ode_tol),
        Check::new("variance_saturation", "dX+ dX- = |<[X+, X-]>|/2", saturation, tol.dynamics),
        Check::new("variance_as_stated", "dX+ dX- = 1/2", stated, tol.dynamics).informational(),
        Check::new(
            "squeeze_identification",
            &format!("{} = S({})", best.exponential, best.z),
            best.residual,
            tol.identification,
        ),
    ];
    let (last, el, var) = rows.last().expect("non-empty");
    let scalars = vec![
        ("psi_phi".into(), el.psi_phi.re),
        ("sinh2".into(), el.psi_phi_expected),
        ("element_residual".into(), el.psi_phi_residual()),
        ("variance_product".into(), var.product),
        ("variance_ratio".into(), var.ratio),
        ("identification_residual".into(), best.residual),
        ("t".into(), last.t),
    ];
    let diagnostics = json!({
        "ode": { "t": t_far, "tol": ode_tol, "accepted_steps": ode.stats.accepted, "rejected_steps": ode.stats.rejected },
        "identification": id,
    });
    Ok(TaskOutcome::finish("dynamics", identity_of("dynamics"), checks, flagged, diagnostics, scalars, table))
}

fn test_pairs(dim: usize) -> bisqueeze::Result<Vec<(FockVector, FockVector)>> {
    let vec = |entries: &[(usize, C64)]| {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        for (n, a) in entries {
            v[*n] = *a;
        }
        FockVector::new(v)
    };
    let c = C64::new;
    Ok(vec![
        (vec(&[(0, c(1.0, 0.0))])?, vec(&[(0, c(1.0, 0.0))])?),
        (vec(&[(1, c(1.0, 0.0))])?, vec(&[(0, c(0.3, 0.0)), (2, c(0.0, 1.0))])?),
        (vec(&[(0, c(1.0, 0.0)), (1, c(0.5, -0.5)), (3, c(0.2, 0.0))])?, vec(&[(1, c(0.7, 0.1)), (2, c(-0.4, 0.0))])?),
    ])
}

fn identity(model: &DeformationModel, p: SqueezeParams, spec: QuadratureSpec, tol: &Tolerances) -> TaskResult {
    let pairs = test_pairs(model.dim())?;
    let results = pairs
        .par_iter()
        .map(|(f, g)| identity_resolution_residual(model, &p, f, g, &spec))
        .collect::<bisqueeze::Result<Vec<_>>>()?;
    let mut table = Table::new(["pair", "integral_re", "integral_im", "exact_re", "exact_im", "residual", "discrete_residual"]);
    let mut checks = Vec::new();
    for (k, res) in results.iter().enumerate() {
        table.push(vec![
            Cell::from(k),
            res.integral.re.into(),
            res.integral.im.into(),
            res.exact.re.into(),
            res.exact.im.into(),
            res.residual.norm().into(),
            res.discrete_residual.norm().into(),
        ])?;
        checks.push(Check::new(&format!("pair_{k}"), identity_of("identity"), res.residual.norm(), tol.identity));
    }
    let worst = results.iter().map(|r| r.residual.norm()).fold(0.0, f64::max);
    let diagnostics = json!({ "quadrature": spec, "r": p.r, "theta": p.theta });
    Ok(TaskOutcome::finish(
        "identity",
        identity_of("identity"),
        checks,
        false,
        diagnostics,
        vec![("max_residual".into(), worst)],
        table,
    ))
}
