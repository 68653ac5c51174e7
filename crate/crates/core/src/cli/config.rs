use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use super::ConfigError;
use crate::classical::{
    close_loop, rlc_scenario, spring_mass_scenario, OpenLoopPlant, RLC_XI0, SPRING_MASS_XI0,
};
use crate::linalg::{matrix_from_rows, CMat, RMat, RVec, C64};
use crate::matexp::DerivMethod;
use crate::quantum::{
    bloch_state, gellmann_basis, spin_chain_scenario, two_qubit_scenario, Perturbation,
    SpinChainParams, TwoQubitParams,
};
use crate::sensan::{ErrorSystem, TimeGrid};

pub const SCHEMA_VERSION: u32 = 1;

/// Upper bound on grid length accepted from a config.
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// Complex number accepted as a bare real or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CNum(pub C64);

impl Serialize for CNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.im == 0.0 {
            s.serialize_f64(self.0.re)
        } else {
            [self.0.re, self.0.im].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for CNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Real(f64),
            Pair([f64; 2]),
        }
        Repr::deserialize(d)
            .map(|r| match r {
                Repr::Real(x) => CNum(C64::new(x, 0.0)),
                Repr::Pair([re, im]) => CNum(C64::new(re, im)),
            })
            .map_err(|_| serde::de::Error::custom("expected a number or a [re, im] pair"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    TraceCsv,
    ReportJson,
}

/// Resolved scenario parameters, with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "snake_case")]
pub enum Scenario {
    SpringMass {
        poles: Vec<CNum>,
        xi0: f64,
    },
    Rlc {
        poles: Vec<CNum>,
        xi0: f64,
    },
    TwoQubit {
        alpha: [CNum; 2],
        delta: [f64; 2],
        gamma: [f64; 2],
        perturbation: Perturbation,
        #[serde(skip_serializing_if = "Option::is_none")]
        rho0: Option<Vec<Vec<CNum>>>,
    },
    SpinChain {
        n: usize,
        lambda: f64,
        coupling: usize,
        input_site: usize,
        output_site: usize,
    },
    Custom {
        a1: Vec<Vec<f64>>,
        s: Vec<Vec<f64>>,
        c: Vec<f64>,
        xi0: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        b: Option<Vec<f64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        poles: Option<Vec<CNum>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        v: Option<Vec<f64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        jordan: Option<usize>,
    },
}

/// A fully validated scenario description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(flatten)]
    pub scenario: Scenario,
    pub grid: TimeGrid,
    pub method: DerivMethod,
    pub outputs: Vec<OutputKind>,
    pub seed: u64,
    pub fit_window: [f64; 2],
    pub oracle_samples: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    kind: String,
    #[serde(default)]
    parameters: Option<Value>,
    grid: Option<RawGrid>,
    method: Option<DerivMethod>,
    outputs: Option<Vec<OutputKind>>,
    seed: Option<u64>,
    fit_window: Option<[f64; 2]>,
    oracle_samples: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    start: f64,
    end: f64,
    step: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawClassical {
    poles: Option<Vec<CNum>>,
    xi0: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTwoQubit {
    alpha: Option<[CNum; 2]>,
    delta: Option<[f64; 2]>,
    gamma: Option<[f64; 2]>,
    perturbation: Option<Perturbation>,
    rho0: Option<Vec<Vec<CNum>>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSpinChain {
    n: Option<usize>,
    lambda: Option<f64>,
    coupling: Option<usize>,
    input_site: Option<usize>,
    output_site: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCustom {
    a1: Vec<Vec<f64>>,
    s: Vec<Vec<f64>>,
    c: Vec<f64>,
    xi0: f64,
    b: Option<Vec<f64>>,
    poles: Option<Vec<CNum>>,
    v: Option<Vec<f64>>,
    jordan: Option<usize>,
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::new(path, message)
}

fn parse_at<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner.as_str()) {
            (true, _) => inner.clone(),
            (false, ".") => prefix.to_string(),
            (false, p) if p.starts_with('[') => format!("{prefix}{p}"),
            (false, p) => format!("{prefix}.{p}"),
        };
        invalid(
            if path == "." { String::new() } else { path },
            e.into_inner().to_string(),
        )
    })
}

fn finite(path: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(path, format!("must be finite, got {x}")))
    }
}

fn positive(path: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(invalid(
            path,
            format!("must be positive and finite, got {x}"),
        ))
    }
}

/// Poles must be finite, strictly stable and closed under conjugation.
fn check_poles(path: &str, poles: &[CNum], expected: usize) -> Result<(), ConfigError> {
    if poles.len() != expected {
        return Err(invalid(
            path,
            format!("expected {expected} poles, got {}", poles.len()),
        ));
    }
    for (i, p) in poles.iter().enumerate() {
        let p = p.0;
        if !(p.re.is_finite() && p.im.is_finite()) {
            return Err(invalid(format!("{path}[{i}]"), "must be finite"));
        }
        if p.re >= 0.0 {
            return Err(invalid(
                format!("{path}[{i}]"),
                format!("pole {p} is not strictly stable"),
            ));
        }
    }
    let mut unmatched: Vec<C64> = poles.iter().map(|p| p.0).filter(|p| p.im != 0.0).collect();
    while let Some(p) = unmatched.pop() {
        let tol = 1e-12 * (1.0 + p.norm());
        match unmatched.iter().position(|q| (q - p.conj()).norm() <= tol) {
            Some(k) => {
                unmatched.swap_remove(k);
            }
            None => return Err(invalid(path, format!("pole {p} has no conjugate partner"))),
        }
    }
    Ok(())
}

fn check_matrix(path: &str, rows: &[Vec<f64>], n: Option<usize>) -> Result<RMat, ConfigError> {
    let m = matrix_from_rows(rows).ok_or_else(|| invalid(path, "rows have unequal lengths"))?;
    let want = n.unwrap_or(m.nrows());
    if m.nrows() != want || m.ncols() != want || want == 0 {
        return Err(invalid(
            path,
            format!(
                "expected a {want}x{want} matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            ),
        ));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(invalid(path, "entries must be finite"));
    }
    Ok(m)
}

fn check_vector(path: &str, v: &[f64], n: usize) -> Result<RVec, ConfigError> {
    if v.len() != n {
        return Err(invalid(
            path,
            format!("expected length {n}, got {}", v.len()),
        ));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid(path, "entries must be finite"));
    }
    Ok(RVec::from_column_slice(v))
}

fn complex_matrix(rows: &[Vec<CNum>]) -> CMat {
    CMat::from_fn(rows.len(), rows.len(), |i, j| rows[i][j].0)
}

fn default_poles(kind: &str) -> Vec<CNum> {
    let real = |xs: &[f64]| xs.iter().map(|&x| CNum(C64::new(x, 0.0))).collect();
    match kind {
        "spring_mass" => real(&[-2.0, -5.0]),
        _ => real(&[-1.0, -2.0, -4.0]),
    }
}

fn default_grid(kind: &str) -> TimeGrid {
    match kind {
        "two_qubit" => TimeGrid {
            start: 0.0,
            end: 2000.0,
            step: 1.0,
        },
        _ => TimeGrid {
            start: 0.0,
            end: 50.0,
            step: 0.01,
        },
    }
}

fn resolve_scenario(kind: &str, params: Value) -> Result<Scenario, ConfigError> {
    Ok(match kind {
        "spring_mass" | "rlc" => {
            let raw: RawClassical = parse_at(params, "parameters")?;
            let (n, default_xi0) = if kind == "spring_mass" {
                (2, SPRING_MASS_XI0)
            } else {
                (3, RLC_XI0)
            };
            let xi0 = positive("parameters.xi0", raw.xi0.unwrap_or(default_xi0))?;
            let poles = raw.poles.unwrap_or_else(|| default_poles(kind));
            check_poles("parameters.poles", &poles, n)?;
            if kind == "spring_mass" {
                Scenario::SpringMass { poles, xi0 }
            } else {
                Scenario::Rlc { poles, xi0 }
            }
        }
        "two_qubit" => {
            let raw: RawTwoQubit = parse_at(params, "parameters")?;
            let d = TwoQubitParams::default();
            let alpha = raw.alpha.unwrap_or([CNum(d.alpha[0]), CNum(d.alpha[1])]);
            for (i, a) in alpha.iter().enumerate() {
                finite(&format!("parameters.alpha[{i}]"), a.0.re)?;
                finite(&format!("parameters.alpha[{i}]"), a.0.im)?;
            }
            let delta = raw.delta.unwrap_or(d.delta);
            for (i, &x) in delta.iter().enumerate() {
                finite(&format!("parameters.delta[{i}]"), x)?;
            }
            let gamma = raw.gamma.unwrap_or(d.gamma);
            for (i, &x) in gamma.iter().enumerate() {
                finite(&format!("parameters.gamma[{i}]"), x)?;
            }
            if let Some(rows) = &raw.rho0 {
                if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
                    return Err(invalid("parameters.rho0", "expected a 4x4 matrix"));
                }
                let basis = gellmann_basis(4).expect("dimension 4 is valid");
                bloch_state(&complex_matrix(rows), &basis)
                    .map_err(|e| invalid("parameters.rho0", e.to_string()))?;
            }
            Scenario::TwoQubit {
                alpha,
                delta,
                gamma,
                perturbation: raw.perturbation.unwrap_or(d.perturbation),
                rho0: raw.rho0,
            }
        }
        "spin_chain" => {
            let raw: RawSpinChain = parse_at(params, "parameters")?;
            let n = raw.n.unwrap_or(2);
            if !(2..=16).contains(&n) {
                return Err(invalid("parameters.n", format!("must lie in 2..=16, got {n}")));
            }
            let d = SpinChainParams::new(n);
            let lambda = positive("parameters.lambda", raw.lambda.unwrap_or(d.lambda))?;
            let coupling = raw.coupling.unwrap_or(d.coupling);
            if coupling < 1 || coupling >= n {
                return Err(invalid(
                    "parameters.coupling",
                    format!("must lie in 1..={}, got {coupling}", n - 1),
                ));
            }
            let input_site = raw.input_site.unwrap_or(d.input_site);
            let output_site = raw.output_site.unwrap_or(d.output_site);
            for (name, site) in [("input_site", input_site), ("output_site", output_site)] {
                if site < 1 || site > n {
                    return Err(invalid(
                        format!("parameters.{name}"),
                        format!("must lie in 1..={n}, got {site}"),
                    ));
                }
            }
            Scenario::SpinChain {
                n,
                lambda,
                coupling,
                input_site,
                output_site,
            }
        }
        "custom" => {
            let params = if params.is_null() {
                Value::Object(Default::default())
            } else {
                params
            };
            let raw: RawCustom = parse_at(params, "parameters")?;
            let a1 = check_matrix("parameters.a1", &raw.a1, None)?;
            let n = a1.nrows();
            check_matrix("parameters.s", &raw.s, Some(n))?;
            check_vector("parameters.c", &raw.c, n)?;
            finite("parameters.xi0", raw.xi0)?;
            match (&raw.b, &raw.poles, &raw.v) {
                (Some(b), Some(poles), None) => {
                    check_vector("parameters.b", b, n)?;
                    check_poles("parameters.poles", poles, n)?;
                }
                (None, None, Some(v)) => {
                    check_vector("parameters.v", v, n)?;
                }
                (Some(_), None, _) => {
                    return Err(invalid("parameters.poles", "required when b is given"))
                }
                (None, Some(_), _) => {
                    return Err(invalid("parameters.b", "required when poles are given"))
                }
                (Some(_), Some(_), Some(_)) => {
                    return Err(invalid("parameters.v", "cannot be combined with b and poles"))
                }
                (None, None, None) => {
                    return Err(invalid("parameters", "give either v or both b and poles"))
                }
            }
            if let Some(ell) = raw.jordan {
                if ell < 2 || ell > n {
                    return Err(invalid(
                        "parameters.jordan",
                        format!("block size must lie in 2..={n}, got {ell}"),
                    ));
                }
            }
            Scenario::Custom {
                a1: raw.a1,
                s: raw.s,
                c: raw.c,
                xi0: raw.xi0,
                b: raw.b,
                poles: raw.poles,
                v: raw.v,
                jordan: raw.jordan,
            }
        }
        other => {
            return Err(invalid(
                "kind",
                format!("unknown kind {other:?}, expected spring_mass, rlc, two_qubit, spin_chain or custom"),
            ))
        }
    })
}

pub(crate) fn check_grid(path: &str, g: TimeGrid) -> Result<TimeGrid, ConfigError> {
    g.validate().map_err(|e| invalid(path, e.to_string()))?;
    if g.len() > MAX_GRID_POINTS {
        return Err(invalid(
            path,
            format!(
                "grid has {} points, at most {MAX_GRID_POINTS} allowed",
                g.len()
            ),
        ));
    }
    Ok(g)
}

fn check_fit_window(w: [f64; 2], g: &TimeGrid) -> Result<[f64; 2], ConfigError> {
    if !(w[0].is_finite() && w[1].is_finite() && w[0] < w[1]) {
        return Err(invalid(
            "fit_window",
            format!("expected finite [lo, hi] with lo < hi, got {w:?}"),
        ));
    }
    if w[0] < g.start || w[1] > g.end {
        return Err(invalid(
            "fit_window",
            format!("window {w:?} leaves the grid [{}, {}]", g.start, g.end),
        ));
    }
    Ok(w)
}

/// Second half of the grid.
pub fn default_fit_window(g: &TimeGrid) -> [f64; 2] {
    [0.5 * (g.start + g.end), g.end]
}

/// Parses and validates a JSON scenario document, filling defaults.
pub fn validate_config(raw: &str) -> Result<ScenarioConfig, ConfigError> {
    let doc: Value =
        serde_json::from_str(raw).map_err(|e| invalid("", format!("malformed JSON: {e}")))?;
    if !doc.is_object() {
        return Err(invalid("", "expected a JSON object"));
    }
    validate_value(doc)
}

/// As [`validate_config`], starting from a parsed document.
pub fn validate_value(doc: Value) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig = parse_at(doc, "")?;
    if raw.schema_version != SCHEMA_VERSION {
        return Err(invalid(
            "schema_version",
            format!(
                "unsupported version {}, expected {SCHEMA_VERSION}",
                raw.schema_version
            ),
        ));
    }
    let scenario = resolve_scenario(
        &raw.kind,
        raw.parameters
            .unwrap_or_else(|| Value::Object(Default::default())),
    )?;
    let grid = match raw.grid {
        Some(g) => check_grid(
            "grid",
            TimeGrid {
                start: g.start,
                end: g.end,
                step: g.step,
            },
        )?,
        None => default_grid(&raw.kind),
    };
    let fit_window = match raw.fit_window {
        Some(w) => check_fit_window(w, &grid)?,
        None => default_fit_window(&grid),
    };
    let outputs = raw
        .outputs
        .unwrap_or_else(|| vec![OutputKind::TraceCsv, OutputKind::ReportJson]);
    let oracle_samples = raw.oracle_samples.unwrap_or(5);
    if oracle_samples > 1000 {
        return Err(invalid(
            "oracle_samples",
            format!("at most 1000, got {oracle_samples}"),
        ));
    }
    Ok(ScenarioConfig {
        schema_version: raw.schema_version,
        scenario,
        grid,
        method: raw.method.unwrap_or_default(),
        outputs,
        seed: raw.seed.unwrap_or(0),
        fit_window,
        oracle_samples,
    })
}

impl ScenarioConfig {
    pub fn kind(&self) -> &'static str {
        match self.scenario {
            Scenario::SpringMass { .. } => "spring_mass",
            Scenario::Rlc { .. } => "rlc",
            Scenario::TwoQubit { .. } => "two_qubit",
            Scenario::SpinChain { .. } => "spin_chain",
            Scenario::Custom { .. } => "custom",
        }
    }

    /// Replaces the grid, moving the fit window to the new grid's second half
    /// when it no longer fits.
    pub fn with_grid(mut self, grid: TimeGrid) -> Result<Self, ConfigError> {
        self.grid = check_grid("grid", grid)?;
        if check_fit_window(self.fit_window, &self.grid).is_err() {
            self.fit_window = default_fit_window(&self.grid);
        }
        Ok(self)
    }

    /// Canonical JSON echo of the resolved config (sorted keys).
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Builds the error system described by the scenario.
    pub fn error_system(&self) -> crate::Result<ErrorSystem> {
        let cvec = |ps: &[CNum]| ps.iter().map(|p| p.0).collect::<Vec<_>>();
        Ok(match &self.scenario {
            Scenario::SpringMass { poles, xi0 } => {
                spring_mass_scenario(*xi0, &cvec(poles))?.error_system()?
            }
            Scenario::Rlc { poles, xi0 } => rlc_scenario(*xi0, &cvec(poles))?.error_system()?,
            Scenario::TwoQubit {
                alpha,
                delta,
                gamma,
                perturbation,
                rho0,
            } => two_qubit_scenario(&TwoQubitParams {
                alpha: [alpha[0].0, alpha[1].0],
                delta: *delta,
                gamma: *gamma,
                perturbation: *perturbation,
                rho0: rho0.as_deref().map(complex_matrix),
            })?
            .error_system()?,
            Scenario::SpinChain {
                n,
                lambda,
                coupling,
                input_site,
                output_site,
            } => spin_chain_scenario(&SpinChainParams {
                n: *n,
                lambda: *lambda,
                coupling: *coupling,
                input_site: *input_site,
                output_site: *output_site,
            })?
            .error_system()?,
            Scenario::Custom {
                a1,
                s,
                c,
                xi0,
                b,
                poles,
                v,
                jordan,
            } => {
                let a1 = matrix_from_rows(a1).expect("validated");
                let s = matrix_from_rows(s).expect("validated");
                let c = RVec::from_column_slice(c);
                let (a0, v) = match (b, poles, v) {
                    (Some(b), Some(poles), _) => {
                        let plant = OpenLoopPlant::new(
                            a1,
                            RVec::from_column_slice(b),
                            c.clone(),
                            s.clone(),
                            *xi0,
                        )?;
                        let cl = close_loop(&plant, &cvec(poles))?;
                        let v = cl.effective_input();
                        (cl.a0, v)
                    }
                    (_, _, Some(v)) => (&a1 + &s * *xi0, RVec::from_column_slice(v)),
                    _ => unreachable!("validated"),
                };
                match jordan {
                    Some(ell) => ErrorSystem::with_jordan(a0, s, c, v, *xi0, *ell)?,
                    None => ErrorSystem::new(a0, s, c, v, *xi0)?,
                }
            }
        })
    }
}

/// Parses `start:end:step`.
pub fn parse_grid(spec: &str) -> Result<TimeGrid, ConfigError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(invalid(
            "--grid",
            format!("expected start:end:step, got {spec:?}"),
        ));
    }
    let mut vals = [0.0; 3];
    for (slot, part) in vals.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| invalid("--grid", format!("{part:?} is not a number")))?;
    }
    check_grid(
        "--grid",
        TimeGrid {
            start: vals[0],
            end: vals[1],
            step: vals[2],
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spring_mass_defaults() {
        let cfg = validate_config(r#"{"schema_version": 1, "kind": "spring_mass"}"#).unwrap();
        match &cfg.scenario {
            Scenario::SpringMass { poles, xi0 } => {
                assert_eq!(*xi0, 4.0);
                assert_eq!(poles, &default_poles("spring_mass"));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(cfg.grid, default_grid("spring_mass"));
        assert_eq!(cfg.fit_window, [25.0, 50.0]);
        let echo = cfg.to_value();
        assert_eq!(echo["parameters"]["xi0"], 4.0);
        assert_eq!(echo["kind"], "spring_mass");
    }

    #[test]
    fn echo_round_trips() {
        let cfg = validate_config(
            r#"{"schema_version": 1, "kind": "two_qubit", "parameters": {"perturbation": "S3"}}"#,
        )
        .unwrap();
        let again = validate_value(cfg.to_value()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn zero_step_rejected() {
        let err = validate_config(
            r#"{"schema_version": 1, "kind": "rlc", "grid": {"start": 0, "end": 1, "step": 0}}"#,
        )
        .unwrap_err();
        assert_eq!(err.path, "grid");
    }

    #[test]
    fn custom_dimension_mismatch_names_field() {
        let err = validate_config(
            r#"{"schema_version": 1, "kind": "custom", "parameters": {
                "a1": [[0,1,0],[0,0,1],[-1,-2,-3]], "s": [[0,0,0],[0,0,0],[1,0,0]],
                "c": [1,0,0], "xi0": 1, "b": [0,1], "poles": [-1,-2,-3]}}"#,
        )
        .unwrap_err();
        assert_eq!(err.path, "parameters.b");
    }

    #[test]
    fn unknown_keys_rejected() {
        let err =
            validate_config(r#"{"schema_version": 1, "kind": "rlc", "colour": 3}"#).unwrap_err();
        assert!(err.message.contains("colour"), "{err}");
        let err = validate_config(
            r#"{"schema_version": 1, "kind": "rlc", "parameters": {"pole": [-1]}}"#,
        )
        .unwrap_err();
        assert_eq!(err.path, "parameters.pole");
        assert!(err.message.contains("pole"), "{err}");
    }

    #[test]
    fn nested_path_reported() {
        let err = validate_config(
            r#"{"schema_version": 1, "kind": "spring_mass", "parameters": {"poles": [-2, "x"]}}"#,
        )
        .unwrap_err();
        assert_eq!(err.path, "parameters.poles[1]");
    }

    #[test]
    fn wrong_version_rejected() {
        let err = validate_config(r#"{"schema_version": 2, "kind": "rlc"}"#).unwrap_err();
        assert_eq!(err.path, "schema_version");
    }

    #[test]
    fn conjugate_closure_required() {
        let err = validate_config(
            r#"{"schema_version": 1, "kind": "spring_mass", "parameters": {"poles": [[-1, 1], [-1, 2]]}}"#,
        )
        .unwrap_err();
        assert_eq!(err.path, "parameters.poles");
    }

    #[test]
    fn grid_flag_parsing() {
        let g = parse_grid("0:10:0.5").unwrap();
        assert_eq!(g.len(), 21);
        assert!(parse_grid("0:10").is_err());
        assert!(parse_grid("5:1:0.1").is_err());
    }
}
