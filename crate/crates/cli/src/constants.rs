//! The `constants` command.

use serde::Serialize;

use euler_blowup::model::{derived_constants, ConstantsBundle};

use crate::config::{Resolved, ScenarioConfig};
use crate::data::InitialData;
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub n: usize,
    pub gamma: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub k: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "K")]
    pub k_integral: f64,
    pub phi_power_integral: f64,
    pub delta: f64,
    pub omega_n: f64,
    pub entropy_inf: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    /// Total energy of Case I data.
    pub energy: Option<f64>,
    #[serde(rename = "G_plus")]
    pub g_plus: Option<f64>,
    #[serde(rename = "G_plusplus")]
    pub g_plusplus: Option<f64>,
    /// Background sound speed of Case II data.
    pub sigma: Option<f64>,
}

/// Entropy infimum over `B_R`: the configured override or the data's own.
pub fn entropy_inf(cfg: &ScenarioConfig, resolved: &Resolved, data: &InitialData) -> Result<f64, CliError> {
    if let Some(s) = cfg.entropy_inf {
        return Ok(s);
    }
    data.initial_profile()
        .entropy_inf(resolved.gas.gamma(), resolved.weight.radius())
        .ok_or_else(|| CliError::Config("the data are vacuum throughout B_R".into()))
}

pub fn bundle(cfg: &ScenarioConfig, resolved: &Resolved, data: &InitialData) -> Result<ConstantsBundle, CliError> {
    let s = entropy_inf(cfg, resolved, data)?;
    Ok(derived_constants(&resolved.gas, &resolved.weight, s)?)
}

pub fn compute(cfg: &ScenarioConfig, resolved: &Resolved, data: &InitialData) -> Result<ConstantsReport, CliError> {
    let k = bundle(cfg, resolved, data)?;
    let energy = match data {
        InitialData::Exact(sol) => Some(sol.energy()),
        InitialData::Table { energy, .. } => Some(*energy),
        InitialData::Case2 { .. } => None,
    };
    Ok(ConstantsReport {
        n: k.n,
        gamma: k.gamma,
        radius: k.radius,
        k: k.k,
        b: k.b,
        c: k.c,
        k_integral: k.k_integral,
        phi_power_integral: k.phi_power_integral,
        delta: k.delta,
        omega_n: k.omega_n,
        entropy_inf: k.entropy_inf,
        a1: k.a1,
        a2: k.a2,
        energy,
        g_plus: energy.map(|e| k.g_plus(e)),
        g_plusplus: energy.map(|e| k.g_plusplus(e)),
        sigma: resolved.background.map(|bg| bg.sigma),
    })
}

impl ConstantsReport {
    /// Aligned `name value` lines for the terminal.
    pub fn table(&self) -> String {
        let mut rows: Vec<(&str, Option<f64>)> = vec![
            ("B", Some(self.b)),
            ("C", Some(self.c)),
            ("K", Some(self.k_integral)),
            ("delta", Some(self.delta)),
            ("omega_n", Some(self.omega_n)),
            ("entropy_inf", Some(self.entropy_inf)),
            ("A1", Some(self.a1)),
            ("A2", Some(self.a2)),
        ];
        rows.push(("G+", self.g_plus));
        rows.push(("G++", self.g_plusplus));
        rows.push(("sigma", self.sigma));
        rows.iter()
            .map(|(name, v)| match v {
                Some(v) => format!("{name:<12} {v:.16e}\n"),
                None => format!("{name:<12} -\n"),
            })
            .collect()
    }
}
