//! Flat `key = value` configuration merged with command-line flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use altproj::completion::{MethodSpec, ProblemFamily};
use altproj::solver::Variant;

/// Every accepted key. Anything else in a config file is rejected.
pub const KEYS: &[&str] = &[
    "preset",
    "family",
    "image",
    "n",
    "n1",
    "n2",
    "rank",
    "oversampling",
    "scale",
    "method",
    "methods",
    "zeta",
    "zetas",
    "lambda_mu",
    "gamma",
    "seed",
    "seeds",
    "max_iter",
    "ell_cap",
    "ritz_tol",
    "record_l",
    "out",
];

/// Bad input from the user; reported with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Raw key/value settings: config file first, flags on top.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(usage(format!("config line {}: unknown key {k:?}", n + 1)));
            }
            values.insert(k.to_string(), v.to_string());
        }
        Ok(Self { values })
    }

    pub fn set(&mut self, key: &str, value: Option<impl ToString>) {
        debug_assert!(KEYS.contains(&key), "{key}");
        if let Some(v) = value {
            self.values.insert(key.to_string(), v.to_string());
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| usage(format!("{key} = {v:?}: {e}"))))
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> anyhow::Result<T>
    where
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<Vec<T>>>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|s| s.trim().parse::<T>().map_err(|e| usage(format!("{key} entry {s:?}: {e}"))))
                    .collect()
            })
            .transpose()
    }
}

/// Problem and solver settings shared by every subcommand, with defaults
/// matching the reference experiment: 512×512, rank 30, oversampling 2.6,
/// λ = μ = 16, 200 iterations, γ = 0.1.
#[derive(Clone, Debug)]
pub struct Common {
    pub family: String,
    pub image: Option<PathBuf>,
    pub n1: usize,
    pub n2: usize,
    pub rank: usize,
    pub oversampling: f64,
    pub lambda_mu: f64,
    pub gamma: f64,
    pub max_iter: usize,
    pub ell_cap: Option<usize>,
    pub ritz_tol: f64,
    pub record_l: bool,
    pub out: PathBuf,
}

fn scaled(v: usize, s: f64) -> usize {
    ((v as f64 * s).round() as usize).max(1)
}

impl Common {
    pub fn resolve(s: &Settings, default_out: &str) -> anyhow::Result<Self> {
        let n: Option<usize> = s.get("n")?;
        let scale: f64 = s.get_or("scale", 1.0)?;
        if !(scale > 0.0 && scale <= 1.0) {
            return Err(usage(format!("scale = {scale} not in (0, 1]")));
        }
        let family: String = s.get_or("family", "gaussian".to_string())?;
        if family != "gaussian" && family != "image" {
            return Err(usage(format!("family must be gaussian or image, got {family:?}")));
        }
        let c = Self {
            family,
            image: s.get("image")?,
            n1: scaled(s.get("n1")?.or(n).unwrap_or(512), scale),
            n2: scaled(s.get("n2")?.or(n).unwrap_or(512), scale),
            rank: scaled(s.get_or("rank", 30)?, scale),
            oversampling: s.get_or("oversampling", 2.6)?,
            lambda_mu: s.get_or("lambda_mu", 16.0)?,
            gamma: s.get_or("gamma", 0.1)?,
            max_iter: s.get_or("max_iter", 200)?,
            ell_cap: s.get("ell_cap")?,
            ritz_tol: s.get_or("ritz_tol", 16.0)?,
            record_l: s.get_or("record_l", false)?,
            out: s.get_or("out", PathBuf::from(default_out))?,
        };
        if c.n1 == 0 || c.n2 == 0 || c.rank > c.n1.min(c.n2) {
            return Err(usage(format!("rank {} invalid for {}x{}", c.rank, c.n1, c.n2)));
        }
        if !(c.gamma > 0.0 && c.gamma < 1.0) {
            return Err(usage(format!("gamma = {} not in (0, 1)", c.gamma)));
        }
        if !(c.lambda_mu > 0.0 && c.lambda_mu.is_finite()) {
            return Err(usage(format!("lambda_mu = {} must be positive", c.lambda_mu)));
        }
        if c.max_iter == 0 {
            return Err(usage("max_iter must be at least 1"));
        }
        if !(c.oversampling > 0.0) {
            return Err(usage("oversampling must be positive"));
        }
        Ok(c)
    }

    pub fn family(&self) -> ProblemFamily {
        if self.family == "image" {
            ProblemFamily::Image {
                path: self.image.clone(),
                size: (self.n1, self.n2),
                rank: self.rank,
                oversampling: self.oversampling,
            }
        } else {
            ProblemFamily::Gaussian {
                n1: self.n1,
                n2: self.n2,
                rank: self.rank,
                oversampling: self.oversampling,
            }
        }
    }

    /// Effective settings as config lines; `scale` is already folded into
    /// the dimensions, so it is echoed as 1.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = vec![("family".to_string(), self.family.clone())];
        if let Some(p) = &self.image {
            out.push(("image".into(), p.display().to_string()));
        }
        out.extend([
            ("n1".to_string(), self.n1.to_string()),
            ("n2".into(), self.n2.to_string()),
            ("rank".into(), self.rank.to_string()),
            ("oversampling".into(), format!("{:?}", self.oversampling)),
            ("scale".into(), "1".into()),
            ("lambda_mu".into(), format!("{:?}", self.lambda_mu)),
            ("gamma".into(), format!("{:?}", self.gamma)),
            ("max_iter".into(), self.max_iter.to_string()),
            ("ritz_tol".into(), format!("{:?}", self.ritz_tol)),
            ("record_l".into(), self.record_l.to_string()),
            ("out".into(), self.out.display().to_string()),
        ]);
        if let Some(c) = self.ell_cap {
            out.push(("ell_cap".into(), c.to_string()));
        }
        out
    }
}

/// Method and `ζ` for `solve`; `ζ` is required to be absent for APM/RAPM.
pub fn resolve_method(s: &Settings) -> anyhow::Result<MethodSpec> {
    let method = s.raw("method").ok_or_else(|| usage("solve needs --method apm|rapm|irapm"))?;
    let variant: Variant = method.parse().map_err(|e| usage(format!("{e}")))?;
    let zeta: Option<f64> = s.get("zeta")?;
    match variant {
        Variant::Irapm => {
            let z = zeta.unwrap_or(1e-7);
            check_zeta(z)?;
            Ok(MethodSpec::new(variant, Some(z)))
        }
        _ if zeta.is_some() => Err(usage(format!("zeta is meaningless for {}", variant.label()))),
        _ => Ok(MethodSpec::new(variant, None)),
    }
}

pub fn check_zeta(z: f64) -> anyhow::Result<()> {
    if z > 0.0 && z <= 1.0 {
        Ok(())
    } else {
        Err(usage(format!("zeta = {z} not in (0, 1]")))
    }
}

/// `methods` × `zetas` for campaigns: iRAPM is expanded over every `ζ`.
pub fn resolve_methods(s: &Settings, default_methods: &[Variant], default_zetas: &[f64]) -> anyhow::Result<Vec<MethodSpec>> {
    let variants: Vec<Variant> = match s.list::<String>("methods")? {
        Some(names) => names
            .iter()
            .map(|n| n.parse::<Variant>().map_err(|e| usage(format!("{e}"))))
            .collect::<anyhow::Result<_>>()?,
        None => default_methods.to_vec(),
    };
    let zetas = s.list::<f64>("zetas")?.unwrap_or_else(|| default_zetas.to_vec());
    for &z in &zetas {
        check_zeta(z)?;
    }
    let mut out = Vec::new();
    for v in variants {
        if v == Variant::Irapm {
            out.extend(zetas.iter().map(|&z| MethodSpec::new(v, Some(z))));
        } else {
            out.push(MethodSpec::new(v, None));
        }
    }
    if out.is_empty() {
        return Err(usage("no methods selected"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_files_and_rejects_unknown_keys() {
        let s = Settings::parse("# comment\nn = 64 # inline\nrank=5\n\nzetas = 1e-9, 1e-7\n").unwrap();
        assert_eq!(s.get::<usize>("n").unwrap(), Some(64));
        assert_eq!(s.list::<f64>("zetas").unwrap(), Some(vec![1e-9, 1e-7]));
        let err = Settings::parse("rnak = 5\n").unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
        assert!(Settings::parse("just text\n").is_err());
    }

    #[test]
    fn defaults_and_scale() {
        let c = Common::resolve(&Settings::default(), "out").unwrap();
        assert_eq!((c.n1, c.n2, c.rank), (512, 512, 30));
        assert_eq!((c.oversampling, c.lambda_mu, c.gamma, c.max_iter), (2.6, 16.0, 0.1, 200));
        let mut s = Settings::default();
        s.set("scale", Some(0.25));
        let c = Common::resolve(&s, "out").unwrap();
        assert_eq!((c.n1, c.n2, c.rank), (128, 128, 8));
    }

    #[test]
    fn method_validation() {
        let mut s = Settings::default();
        s.set("method", Some("apm"));
        assert_eq!(resolve_method(&s).unwrap().zeta, None);
        s.set("zeta", Some(1e-7));
        assert!(resolve_method(&s).is_err());
        s.set("method", Some("irapm"));
        assert_eq!(resolve_method(&s).unwrap().zeta, Some(1e-7));
        s.set("zeta", Some(0.0));
        assert!(resolve_method(&s).is_err());
    }
}
