//! Experiment configuration: defaults, validation, and the TOML loader.
//!
//! The config grammar uses sections `geometry`, `pathloss`, `power`,
//! `solver`, `experiment`, and `complexity`; every key may also be given at
//! the document root. Powers are written in dBm (`p_s_dbm = 35`) or watts
//! (`p_s_watts = 3.16`); dBm values are converted on load. An empty document
//! yields the full default configuration.

use std::path::PathBuf;

use toml::Value;

use crate::beamformers::{Method, SolverTolerances};
use crate::channel::{Geometry, PathLossModel, SystemParams};
use crate::harness::flops::ComplexityParams;
use crate::{Error, Result};

const DEFAULT_BS: [f64; 2] = [0.0, 0.0];
const DEFAULT_IRS: [f64; 2] = [150.0, 20.0];
const DEFAULT_USER: [f64; 2] = [150.0, 0.0];

// Default link budget: strong BS->IRS link, heavily attenuated IRS->user
// and direct links. This keeps the reflected path dominant while the
// amplification noise reaching the user stays below thermal noise, the
// regime where all five methods are comparable on one plot.
const DEFAULT_REF_GAIN: f64 = 1e-3;
const DEFAULT_ALPHA_BI: f64 = 2.2;
const DEFAULT_ALPHA_IU: f64 = 5.0;
const DEFAULT_ALPHA_BU: f64 = 4.0;

const DEFAULT_P_S_DBM: f64 = 35.0;
const DEFAULT_P_I_DBM: f64 = 25.0;
const DEFAULT_SIGMA_I_DBM: f64 = -70.0;
const DEFAULT_SIGMA_U_DBM: f64 = -70.0;

const DEFAULT_N_LIST: [usize; 5] = [16, 32, 64, 128, 256];
const DEFAULT_TRIALS: usize = 500;
const DEFAULT_BASE_SEED: u64 = 7;

/// `x` dBm as watts: `10^((x - 30) / 10)`.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Everything a sweep needs: scene, link budget, solver stopping rules, and
/// the Monte-Carlo protocol.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub geometry: Geometry,
    pub pathloss: PathLossModel,
    /// Transmit power, watts.
    pub p_s: f64,
    /// Reflect power budget, watts.
    pub p_i: f64,
    /// Amplification noise power, watts.
    pub sigma_i_sq: f64,
    /// Thermal noise power at the user, watts.
    pub sigma_u_sq: f64,
    pub tolerances: SolverTolerances,
    pub methods: Vec<Method>,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    pub output_path: Option<PathBuf>,
    /// Iteration counts for the flop model; `None` means "measure them".
    pub complexity: Option<ComplexityParams>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            geometry: Geometry::new(DEFAULT_BS, DEFAULT_IRS, DEFAULT_USER)
                .expect("default geometry is valid"),
            pathloss: PathLossModel::new(
                DEFAULT_REF_GAIN,
                DEFAULT_ALPHA_BI,
                DEFAULT_ALPHA_IU,
                DEFAULT_ALPHA_BU,
            )
            .expect("default path-loss model is valid"),
            p_s: dbm_to_watts(DEFAULT_P_S_DBM),
            p_i: dbm_to_watts(DEFAULT_P_I_DBM),
            sigma_i_sq: dbm_to_watts(DEFAULT_SIGMA_I_DBM),
            sigma_u_sq: dbm_to_watts(DEFAULT_SIGMA_U_DBM),
            tolerances: SolverTolerances::default(),
            methods: Method::ALL.to_vec(),
            n_list: DEFAULT_N_LIST.to_vec(),
            trials: DEFAULT_TRIALS,
            base_seed: DEFAULT_BASE_SEED,
            output_path: None,
            complexity: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("experiment.trials", "must be at least 1"));
        }
        if self.n_list.is_empty() {
            return Err(Error::config("experiment.n_list", "must be non-empty"));
        }
        if self.n_list.contains(&0) {
            return Err(Error::config("experiment.n_list", "element counts must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::config("experiment.methods", "must be non-empty"));
        }
        for (field, value) in [
            ("power.p_s", self.p_s),
            ("power.p_i", self.p_i),
            ("power.sigma_i_sq", self.sigma_i_sq),
            ("power.sigma_u_sq", self.sigma_u_sq),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::config(field, "must be a positive finite power in watts"));
            }
        }
        self.tolerances.validate().map_err(|e| Error::config("solver", e))?;
        self.pathloss
            .link_gains(&self.geometry)
            .map_err(|e| Error::config("geometry", e))?;
        Ok(())
    }

    /// System parameters for one element count.
    pub fn system_params(&self, n: usize) -> Result<SystemParams> {
        SystemParams::new(self.p_s, self.p_i, self.sigma_i_sq, self.sigma_u_sq, n)
    }
}

/// Known sections and the keys each accepts.
const SECTIONS: &[(&str, &[&str])] = &[
    ("geometry", &["bs", "irs", "user"]),
    ("pathloss", &["ref_gain", "alpha_bi", "alpha_iu", "alpha_bu"]),
    (
        "power",
        &[
            "p_s_dbm",
            "p_s_watts",
            "p_i_dbm",
            "p_i_watts",
            "sigma_i_dbm",
            "sigma_i_sq_watts",
            "sigma_u_dbm",
            "sigma_u_sq_watts",
        ],
    ),
    ("solver", &["eps_outer", "eps_inner", "max_outer", "max_inner"]),
    ("experiment", &["methods", "n_list", "trials", "base_seed", "output_path"]),
    ("complexity", &["l1", "l2", "l3", "l4"]),
];

struct Doc {
    root: toml::value::Table,
}

impl Doc {
    /// Rejects misspelled sections and keys instead of silently ignoring
    /// them.
    fn check_unknown(&self) -> Result<()> {
        for (key, val) in &self.root {
            if let Some((section, keys)) = SECTIONS.iter().find(|(s, _)| s == key) {
                let table = val
                    .as_table()
                    .ok_or_else(|| Error::config(section, "expected a table section"))?;
                for k in table.keys() {
                    if !keys.contains(&k.as_str()) {
                        return Err(Error::config(&format!("{section}.{k}"), "unrecognized field"));
                    }
                }
            } else if !SECTIONS.iter().any(|(_, keys)| keys.contains(&key.as_str())) {
                return Err(Error::config(key, "unrecognized field"));
            }
        }
        Ok(())
    }

    /// Key lookup in its section first, then at the document root.
    fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.root
            .get(section)
            .and_then(|v| v.as_table())
            .and_then(|t| t.get(key))
            .or_else(|| self.root.get(key))
    }

    fn number(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(_) => Err(Error::config(&format!("{section}.{key}"), "expected a number")),
        }
    }

    fn number_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        Ok(self.number(section, key)?.unwrap_or(default))
    }

    fn integer(&self, section: &str, key: &str) -> Result<Option<i64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(*i)),
            Some(_) => Err(Error::config(&format!("{section}.{key}"), "expected an integer")),
        }
    }

    fn count_or(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        match self.integer(section, key)? {
            None => Ok(default),
            Some(i) if i >= 1 => Ok(i as usize),
            Some(_) => Err(Error::config(&format!("{section}.{key}"), "must be at least 1")),
        }
    }

    fn point(&self, key: &str, default: [f64; 2]) -> Result<[f64; 2]> {
        let field = format!("geometry.{key}");
        match self.get("geometry", key) {
            None => Ok(default),
            Some(Value::Array(a)) if a.len() == 2 => {
                let mut out = [0.0; 2];
                for (slot, v) in out.iter_mut().zip(a) {
                    *slot = match v {
                        Value::Float(x) => *x,
                        Value::Integer(i) => *i as f64,
                        _ => return Err(Error::config(&field, "expected a pair of numbers")),
                    };
                }
                Ok(out)
            }
            Some(_) => Err(Error::config(&field, "expected a pair of numbers `[x, y]`")),
        }
    }

    /// One power value: dBm key and watts key are mutually exclusive; the
    /// default is in dBm.
    fn power(&self, dbm_key: &str, watts_key: &str, default_dbm: f64) -> Result<f64> {
        let dbm = self.number("power", dbm_key)?;
        let watts = self.number("power", watts_key)?;
        match (dbm, watts) {
            (Some(_), Some(_)) => Err(Error::config(
                &format!("power.{watts_key}"),
                format!("conflicts with {dbm_key}; give one or the other"),
            )),
            (Some(d), None) => Ok(dbm_to_watts(d)),
            (None, Some(w)) => Ok(w),
            (None, None) => Ok(dbm_to_watts(default_dbm)),
        }
    }

    fn methods(&self) -> Result<Vec<Method>> {
        match self.get("experiment", "methods") {
            None => Ok(Method::ALL.to_vec()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| {
                    let tag = v.as_str().ok_or_else(|| {
                        Error::config("experiment.methods", "expected an array of method tags")
                    })?;
                    Method::parse(tag).map_err(|e| Error::config("experiment.methods", e))
                })
                .collect(),
            Some(_) => {
                Err(Error::config("experiment.methods", "expected an array of method tags"))
            }
        }
    }

    fn n_list(&self) -> Result<Vec<usize>> {
        match self.get("experiment", "n_list") {
            None => Ok(DEFAULT_N_LIST.to_vec()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    Value::Integer(i) if *i >= 1 => Ok(*i as usize),
                    _ => Err(Error::config(
                        "experiment.n_list",
                        "expected an array of integers, each at least 1",
                    )),
                })
                .collect(),
            Some(_) => Err(Error::config("experiment.n_list", "expected an array of integers")),
        }
    }

    fn complexity(&self) -> Result<Option<ComplexityParams>> {
        let vals: Vec<Option<i64>> = ["l1", "l2", "l3", "l4"]
            .iter()
            .map(|k| self.integer("complexity", k))
            .collect::<Result<_>>()?;
        if vals.iter().all(Option::is_none) && self.root.get("complexity").is_none() {
            return Ok(None);
        }
        let mut out = [1u64; 4];
        for ((slot, v), key) in out.iter_mut().zip(&vals).zip(["l1", "l2", "l3", "l4"]) {
            if let Some(i) = v {
                if *i < 1 {
                    return Err(Error::config(&format!("complexity.{key}"), "must be at least 1"));
                }
                *slot = *i as u64;
            }
        }
        Ok(Some(ComplexityParams::new(out[0], out[1], out[2], out[3])?))
    }
}

/// Parses an inline TOML document into a fully-validated config; missing
/// fields take the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let value: Value = text
        .parse()
        .map_err(|e| Error::config("document", format!("not valid TOML: {e}")))?;
    let root = match value {
        Value::Table(t) => t,
        _ => return Err(Error::config("document", "top level must be a table")),
    };
    let doc = Doc { root };
    doc.check_unknown()?;

    let geometry = Geometry::new(
        doc.point("bs", DEFAULT_BS)?,
        doc.point("irs", DEFAULT_IRS)?,
        doc.point("user", DEFAULT_USER)?,
    )
    .map_err(|e| Error::config("geometry", e))?;
    let pathloss = PathLossModel::new(
        doc.number_or("pathloss", "ref_gain", DEFAULT_REF_GAIN)?,
        doc.number_or("pathloss", "alpha_bi", DEFAULT_ALPHA_BI)?,
        doc.number_or("pathloss", "alpha_iu", DEFAULT_ALPHA_IU)?,
        doc.number_or("pathloss", "alpha_bu", DEFAULT_ALPHA_BU)?,
    )
    .map_err(|e| Error::config("pathloss", e))?;

    let tolerances = SolverTolerances {
        eps_outer: doc.number_or("solver", "eps_outer", 1e-3)?,
        eps_inner: doc.number_or("solver", "eps_inner", 1e-4)?,
        max_outer: doc.count_or("solver", "max_outer", 50)?,
        max_inner: doc.count_or("solver", "max_inner", 100)?,
    };

    let base_seed = match doc.integer("experiment", "base_seed")? {
        None => DEFAULT_BASE_SEED,
        Some(i) if i >= 0 => i as u64,
        Some(_) => return Err(Error::config("experiment.base_seed", "must be non-negative")),
    };
    let output_path = match doc.get("experiment", "output_path") {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => return Err(Error::config("experiment.output_path", "expected a string path")),
    };

    let cfg = ExperimentConfig {
        geometry,
        pathloss,
        p_s: doc.power("p_s_dbm", "p_s_watts", DEFAULT_P_S_DBM)?,
        p_i: doc.power("p_i_dbm", "p_i_watts", DEFAULT_P_I_DBM)?,
        sigma_i_sq: doc.power("sigma_i_dbm", "sigma_i_sq_watts", DEFAULT_SIGMA_I_DBM)?,
        sigma_u_sq: doc.power("sigma_u_dbm", "sigma_u_sq_watts", DEFAULT_SIGMA_U_DBM)?,
        tolerances,
        methods: doc.methods()?,
        n_list: doc.n_list()?,
        trials: doc.count_or("experiment", "trials", DEFAULT_TRIALS)?,
        base_seed,
        output_path,
        complexity: doc.complexity()?,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and parses a config file, naming the path on failure.
pub fn parse_config_file(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_conversion_hits_known_points() {
        assert_eq!(dbm_to_watts(30.0), 1.0);
        assert!((dbm_to_watts(35.0) - 3.1623).abs() <= 1e-4);
        assert!((dbm_to_watts(-70.0) / 1e-10 - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert!((cfg.p_s - 3.1623).abs() <= 1e-4);
        assert!((cfg.p_i - 0.31623).abs() <= 1e-5);
        assert!((cfg.sigma_u_sq / 1e-10 - 1.0).abs() <= 1e-12);
        assert_eq!(cfg.n_list, vec![16, 32, 64, 128, 256]);
        assert_eq!(cfg.trials, 500);
        assert_eq!(cfg.methods.len(), 5);
        assert_eq!(cfg.geometry.irs(), [150.0, 20.0]);
        assert!(cfg.complexity.is_none());
        assert!(cfg.output_path.is_none());
    }

    #[test]
    fn flat_keys_resolve_like_sectioned_ones() {
        let flat = parse_config("p_s_dbm = 35").unwrap();
        let sectioned = parse_config("[power]\np_s_dbm = 35").unwrap();
        assert_eq!(flat.p_s, sectioned.p_s);
        assert!((flat.p_s - 3.1623).abs() <= 1e-4);

        let cfg = parse_config("sigma_u_dbm = -70").unwrap();
        assert!((cfg.sigma_u_sq / 1e-10 - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn full_document_round_trips() {
        let text = r#"
            [geometry]
            bs = [0, 0]
            irs = [100.0, 10.0]
            user = [100.0, 0]

            [pathloss]
            ref_gain = 2e-3
            alpha_bi = 2.3
            alpha_iu = 4.5
            alpha_bu = 3.9

            [power]
            p_s_watts = 2.0
            p_i_dbm = 20

            [solver]
            eps_outer = 1e-4
            max_outer = 80

            [experiment]
            methods = ["gmrr", "passive"]
            n_list = [8, 16]
            trials = 12
            base_seed = 99
            output_path = "runs/out.csv"

            [complexity]
            l1 = 4
            l2 = 2
            l3 = 150
            l4 = 3
        "#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.geometry.irs(), [100.0, 10.0]);
        assert_eq!(cfg.pathloss.alpha_iu(), 4.5);
        assert_eq!(cfg.p_s, 2.0);
        assert!((cfg.p_i - 0.1).abs() <= 1e-12);
        assert_eq!(cfg.tolerances.eps_outer, 1e-4);
        assert_eq!(cfg.tolerances.max_outer, 80);
        assert_eq!(cfg.methods, vec![Method::Gmrr, Method::Passive]);
        assert_eq!(cfg.n_list, vec![8, 16]);
        assert_eq!(cfg.trials, 12);
        assert_eq!(cfg.base_seed, 99);
        assert_eq!(cfg.output_path.as_deref(), Some(std::path::Path::new("runs/out.csv")));
        let cp = cfg.complexity.unwrap();
        assert_eq!((cp.l1, cp.l2, cp.l3, cp.l4), (4, 2, 150, 3));
    }

    #[test]
    fn unknown_fields_are_rejected_by_name() {
        let err = parse_config("[pathloss]\nalpha_ui = 3.0").unwrap_err();
        assert!(err.to_string().contains("pathloss.alpha_ui"), "{err}");
        let err = parse_config("bogus_key = 1").unwrap_err();
        assert!(err.to_string().contains("bogus_key"), "{err}");
    }

    #[test]
    fn conflicting_power_units_are_rejected() {
        let err = parse_config("[power]\np_s_dbm = 35\np_s_watts = 3.0").unwrap_err();
        assert!(err.to_string().contains("p_s_watts"), "{err}");
    }

    #[test]
    fn out_of_range_values_name_the_field() {
        let err = parse_config("[experiment]\ntrials = 0").unwrap_err();
        assert!(err.to_string().contains("experiment.trials"), "{err}");
        let err = parse_config("[experiment]\nn_list = []").unwrap_err();
        assert!(err.to_string().contains("experiment.n_list"), "{err}");
        let err = parse_config("[pathloss]\nalpha_bi = 1.5").unwrap_err();
        assert!(err.to_string().contains("pathloss"), "{err}");
        let err = parse_config("[experiment]\nmethods = [\"bogus\"]").unwrap_err();
        assert!(err.to_string().contains("experiment.methods"), "{err}");
        let err = parse_config("not toml ===").unwrap_err();
        assert!(err.to_string().contains("document"), "{err}");
    }

    #[test]
    fn complexity_section_implies_overrides() {
        let cfg = parse_config("[complexity]\nl3 = 200").unwrap();
        let cp = cfg.complexity.unwrap();
        assert_eq!((cp.l1, cp.l2, cp.l3, cp.l4), (1, 1, 200, 1));
        let err = parse_config("[complexity]\nl2 = 0").unwrap_err();
        assert!(err.to_string().contains("complexity.l2"), "{err}");
    }
}
