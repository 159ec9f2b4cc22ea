use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{ence_with_layout, estimators, rank, zmse_with_layout, BinLayout, BinningConfig, PairedSample};

/// The statistic under study. Binned statistics carry their binning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "UPPERCASE")]
pub enum StatisticKind {
    Zms,
    Cc,
    Rce,
    Ence(BinningConfig),
    Zmse(BinningConfig),
    Nll,
}

impl StatisticKind {
    /// Parses a case-insensitive statistic name. `binning` is attached to
    /// ENCE/ZMSE and ignored for the others.
    pub fn parse(name: &str, binning: BinningConfig) -> Result<Self> {
        Ok(match name.to_ascii_lowercase().as_str() {
            "zms" => Self::Zms,
            "cc" => Self::Cc,
            "rce" => Self::Rce,
            "ence" => Self::Ence(binning),
            "zmse" => Self::Zmse(binning),
            "nll" => Self::Nll,
            other => return Err(Error::InvalidConfig(format!("unknown statistic '{other}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Zms => "ZMS",
            Self::Cc => "CC",
            Self::Rce => "RCE",
            Self::Ence(_) => "ENCE",
            Self::Zmse(_) => "ZMSE",
            Self::Nll => "NLL",
        }
    }

    pub fn binning(&self) -> Option<&BinningConfig> {
        match self {
            Self::Ence(b) | Self::Zmse(b) => Some(b),
            _ => None,
        }
    }

    pub fn with_binning(self, binning: BinningConfig) -> Self {
        match self {
            Self::Ence(_) => Self::Ence(binning),
            Self::Zmse(_) => Self::Zmse(binning),
            other => other,
        }
    }

    pub fn evaluate(&self, sample: &PairedSample) -> Result<f64> {
        match self {
            Self::Zms => Ok(estimators::zms(sample)),
            Self::Cc => rank::spearman_cc(sample),
            Self::Rce => Ok(estimators::rce(sample)),
            Self::Ence(b) => estimators::ence(sample, b),
            Self::Zmse(b) => estimators::zmse(sample, b),
            Self::Nll => Ok(estimators::nll(sample)),
        }
    }

    /// Reference value known without simulation: 1 for ZMS, 0 for RCE and
    /// the uncertainty-dependent NLL reference.
    pub fn predefined_reference(&self, sample: &PairedSample) -> Option<f64> {
        match self {
            Self::Zms => Some(1.0),
            Self::Rce => Some(0.0),
            Self::Nll => Some(estimators::nll_ref(sample)),
            Self::Cc | Self::Ence(_) | Self::Zmse(_) => None,
        }
    }

    pub fn has_predefined_reference(&self) -> bool {
        matches!(self, Self::Zms | Self::Rce | Self::Nll)
    }

    /// Freezes the bin layout for repeated evaluation on samples sharing the
    /// uncertainties and features of `template`.
    pub fn prepare(&self, template: &PairedSample) -> Result<PreparedStatistic> {
        let layout = match self.binning() {
            Some(b) => Some(b.layout(template)?),
            None => None,
        };
        Ok(PreparedStatistic { kind: *self, layout })
    }
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.binning() {
            Some(b) => write!(f, "{}(N={})", self.name(), b.bins),
            None => f.write_str(self.name()),
        }
    }
}

/// A statistic with its binning resolved against fixed sort keys.
#[derive(Debug, Clone)]
pub struct PreparedStatistic {
    kind: StatisticKind,
    layout: Option<BinLayout>,
}

impl PreparedStatistic {
    pub fn kind(&self) -> &StatisticKind {
        &self.kind
    }

    pub fn evaluate(&self, sample: &PairedSample) -> Result<f64> {
        match (&self.kind, &self.layout) {
            (StatisticKind::Ence(_), Some(layout)) => Ok(ence_with_layout(sample, layout)),
            (StatisticKind::Zmse(_), Some(layout)) => zmse_with_layout(sample, layout),
            (kind, _) => kind.evaluate(sample),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        let b = BinningConfig::new(20);
        assert_eq!(StatisticKind::parse("ZmS", b).unwrap(), StatisticKind::Zms);
        assert_eq!(StatisticKind::parse("ence", b).unwrap(), StatisticKind::Ence(b));
        assert!(StatisticKind::parse("mae", b).is_err());
        assert!(StatisticKind::Zms.binning().is_none());
        assert_eq!(StatisticKind::Zmse(b).binning(), Some(&b));
    }

    #[test]
    fn serde_shape() {
        let k = StatisticKind::Ence(BinningConfig::new(20));
        let json = serde_json::to_string(&k).unwrap();
        assert_eq!(
            json,
            r#"{"name":"ENCE","bins":20,"min_bin_size":1,"variable":"uncertainty"}"#
        );
        assert_eq!(serde_json::from_str::<StatisticKind>(&json).unwrap(), k);
        assert_eq!(serde_json::to_string(&StatisticKind::Nll).unwrap(), r#"{"name":"NLL"}"#);
    }

    #[test]
    fn prepared_matches_direct() {
        let u: Vec<f64> = (1..=40).map(|i| f64::from(i) * 0.1).collect();
        let e: Vec<f64> = u.iter().enumerate().map(|(i, x)| x * (1.0 + 0.03 * i as f64)).collect();
        let s = PairedSample::new(e, u).unwrap();
        let b = BinningConfig::new(4).with_min_bin_size(5);
        for kind in [StatisticKind::Ence(b), StatisticKind::Zmse(b), StatisticKind::Cc] {
            let prepared = kind.prepare(&s).unwrap();
            assert_eq!(prepared.evaluate(&s).unwrap(), kind.evaluate(&s).unwrap());
        }
    }
}
