//! Flat `key = value` experiment configs.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! line    := blank | comment | entry
//! comment := '#' anything
//! entry   := key '=' value [comment]
//! list    := value (',' value)*
//! ```
//!
//! Keys map one-to-one onto [`ExperimentConfig`] fields plus the learner
//! parameters `k`, `bags` and `bag_size`:
//!
//! | key             | value                                      | default      |
//! |-----------------|--------------------------------------------|--------------|
//! | instance        | `interval` or `finite`                     | required     |
//! | learner         | `single`, `maj3`, `simon`, `maj_k`, `bagging` | required  |
//! | erm             | `zero`, `max_ones`, `adversarial`          | required     |
//! | n_grid          | list of ascending integers                 | required     |
//! | n_basis         | `piece` or `total`                         | `piece`      |
//! | k               | odd integer, for `maj_k`                   |              |
//! | bags            | odd integer, for `bagging`                 |              |
//! | bag_size        | integer, for `bagging`                     | sample size  |
//! | d               | integer >= 1                               | 1            |
//! | delta           | real in (0, 1/2]                           | 0.1          |
//! | C               | real > 0                                   | shipped C    |
//! | trials          | integer >= 1                               | 2000         |
//! | master_seed     | u64                                        | 0            |
//! | quantile_levels | list of reals in (0, 1)                    | `1 - delta`  |

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use maj3lab_core::instances::DEFAULT_C;
use maj3lab_core::{DomainKind, ErmKind, ExperimentConfig, LearnerKind, LearnerSpec, NBasis};

const KEYS: &[&str] = &[
    "instance",
    "learner",
    "erm",
    "n_grid",
    "n_basis",
    "k",
    "bags",
    "bag_size",
    "d",
    "delta",
    "C",
    "trials",
    "master_seed",
    "quantile_levels",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line, or 0 when the problem is a missing key.
    pub line: usize,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "field `{}`: {}", self.field, self.message)
        } else {
            write!(f, "line {}: field `{}`: {}", self.line, self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

struct Entry {
    line: usize,
    value: String,
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.0.get(key).map_or(0, |e| e.line),
            field: key.to_string(),
            message: message.into(),
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|e| e.value.as_str())
    }

    fn required(&self, key: &str) -> Result<&str, ConfigError> {
        self.raw(key).ok_or_else(|| self.err(key, "missing required key"))
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| self.err(key, format!("cannot parse `{v}`: {e}"))))
            .transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<T>().map_err(|e| self.err(key, format!("cannot parse `{s}`: {e}"))))
                    .collect()
            })
            .transpose()
    }
}

fn tokenize(text: &str) -> Result<Entries, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError {
                line,
                field: content.to_string(),
                message: "expected `key = value`".into(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError {
                line,
                field: key.to_string(),
                message: format!("unknown key (known: {})", KEYS.join(", ")),
            });
        }
        if value.is_empty() {
            return Err(ConfigError {
                line,
                field: key.to_string(),
                message: "empty value".into(),
            });
        }
        if let Some(prev) = map.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        ) {
            return Err(ConfigError {
                line,
                field: key.to_string(),
                message: format!("duplicate key (first set on line {})", prev.line),
            });
        }
    }
    Ok(Entries(map))
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let e = tokenize(text)?;

    let instance = match e.required("instance")? {
        "interval" => DomainKind::Interval,
        "finite" => DomainKind::Finite,
        other => return Err(e.err("instance", format!("expected `interval` or `finite`, got `{other}`"))),
    };
    let erm_name = e.required("erm")?;
    let erm = ErmKind::parse(erm_name)
        .ok_or_else(|| e.err("erm", format!("expected zero, max_ones or adversarial, got `{erm_name}`")))?;
    let kind = match e.required("learner")? {
        "single" => LearnerKind::Single,
        "maj3" => LearnerKind::Maj3Disjoint,
        "simon" => LearnerKind::SimonPrefix,
        "maj_k" => LearnerKind::MajKDisjoint {
            k: e.parse("k")?.ok_or_else(|| e.err("k", "maj_k needs `k`"))?,
        },
        "bagging" => LearnerKind::Bagging {
            bags: e.parse("bags")?.ok_or_else(|| e.err("bags", "bagging needs `bags`"))?,
            bag_size: e.parse("bag_size")?,
        },
        other => {
            return Err(e.err(
                "learner",
                format!("expected single, maj3, simon, maj_k or bagging, got `{other}`"),
            ))
        }
    };
    let learner = LearnerSpec::new(kind, erm).map_err(|err| e.err("learner", err.to_string()))?;
    let n_basis = match e.raw("n_basis").unwrap_or("piece") {
        "piece" => NBasis::Piece,
        "total" => NBasis::Total,
        other => return Err(e.err("n_basis", format!("expected `piece` or `total`, got `{other}`"))),
    };
    let n_grid = e.list("n_grid")?.ok_or_else(|| e.err("n_grid", "missing required key"))?;

    let config = ExperimentConfig {
        instance,
        learner,
        n_grid,
        n_basis,
        d: e.parse("d")?.unwrap_or(1),
        delta: e.parse("delta")?.unwrap_or(0.1),
        c: e.parse("C")?.unwrap_or(DEFAULT_C),
        trials: e.parse("trials")?.unwrap_or(2000),
        master_seed: e.parse("master_seed")?.unwrap_or(0),
        quantile_levels: e.list("quantile_levels")?.unwrap_or_default(),
    };
    config.validate().map_err(|err| {
        let field = match &err {
            maj3lab_core::Error::DomainMismatch(_) => "erm",
            _ => {
                let msg = err.to_string();
                msg.split(|ch: char| !(ch.is_alphanumeric() || ch == '_'))
                    .find_map(|word| match word {
                        "quantile" => Some("quantile_levels"),
                        w => KEYS.iter().copied().find(|k| *k == w),
                    })
                    .unwrap_or("config")
            }
        };
        e.err(field, err.to_string())
    })?;
    Ok(config)
}

pub fn load_config(path: &Path) -> anyhow::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn learner_keys(kind: LearnerKind) -> String {
    match kind {
        LearnerKind::Single => "learner = single\n".into(),
        LearnerKind::Maj3Disjoint => "learner = maj3\n".into(),
        LearnerKind::SimonPrefix => "learner = simon\n".into(),
        LearnerKind::MajKDisjoint { k } => format!("learner = maj_k\nk = {k}\n"),
        LearnerKind::Bagging { bags, bag_size } => {
            let mut s = format!("learner = bagging\nbags = {bags}\n");
            if let Some(b) = bag_size {
                s.push_str(&format!("bag_size = {b}\n"));
            }
            s
        }
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Renders a config in the grammar above; `parse_config` inverts it.
pub fn render_config(c: &ExperimentConfig) -> String {
    let instance = match c.instance {
        DomainKind::Interval => "interval",
        DomainKind::Finite => "finite",
    };
    let mut s = format!("instance = {instance}\n");
    s.push_str(&learner_keys(c.learner.kind));
    s.push_str(&format!("erm = {}\n", c.learner.erm));
    s.push_str(&format!("n_grid = {}\n", join(&c.n_grid)));
    s.push_str(&format!("n_basis = {}\n", c.n_basis.name()));
    s.push_str(&format!("d = {}\ndelta = {:?}\nC = {:?}\n", c.d, c.delta, c.c));
    s.push_str(&format!("trials = {}\nmaster_seed = {}\n", c.trials, c.master_seed));
    if !c.quantile_levels.is_empty() {
        let levels: Vec<String> = c.quantile_levels.iter().map(|l| format!("{l:?}")).collect();
        s.push_str(&format!("quantile_levels = {}\n", levels.join(",")));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "instance = finite\nlearner = single\nerm = max_ones\nn_grid = 100\n";

    #[test]
    fn minimal_config_uses_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.n_grid, vec![100]);
        assert_eq!((c.d, c.trials, c.master_seed), (1, 2000, 0));
        assert_eq!(c.delta, 0.1);
        assert_eq!(c.c, DEFAULT_C);
        assert_eq!(c.n_basis, NBasis::Piece);
    }

    #[test]
    fn comments_and_whitespace() {
        let text = "# sweep\n\n  instance=interval  # trailing\nlearner = maj_k\nk = 5\nerm = adversarial\nn_grid = 300, 1000 ,3000\nquantile_levels = 0.9,0.99\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.learner.kind, LearnerKind::MajKDisjoint { k: 5 });
        assert_eq!(c.n_grid, vec![300, 1000, 3000]);
        assert_eq!(c.quantile_levels, vec![0.9, 0.99]);
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let err = parse_config("instance = finite\nlearner = single\nerm = max_ones\nn_grid = 100\ntrials = many\n").unwrap_err();
        assert_eq!((err.line, err.field.as_str()), (5, "trials"));
        let err = parse_config("instance = finite\nbogus = 1\n").unwrap_err();
        assert_eq!((err.line, err.field.as_str()), (2, "bogus"));
        let err = parse_config("instance = finite\nlearner single\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_config("instance = finite\ninstance = interval\n").unwrap_err();
        assert!(err.message.contains("duplicate"));
        let err = parse_config("instance = finite\nlearner = single\nerm = max_ones\n").unwrap_err();
        assert_eq!((err.line, err.field.as_str()), (0, "n_grid"));
        let err = parse_config(&format!("{MINIMAL}delta = 0.7\n")).unwrap_err();
        assert_eq!((err.line, err.field.as_str()), (5, "delta"));
        let err = parse_config("instance = interval\nlearner = single\nerm = max_ones\nn_grid = 100\n").unwrap_err();
        assert_eq!((err.line, err.field.as_str()), (3, "erm"));
        let err = parse_config("instance = interval\nlearner = maj_k\nk = 4\nerm = zero\nn_grid = 9\n").unwrap_err();
        assert_eq!((err.line, err.field.as_str()), (2, "learner"));
    }

    #[test]
    fn render_round_trips() {
        let text = "instance = interval\nlearner = bagging\nbags = 5\nbag_size = 40\nerm = adversarial\nn_grid = 30,60\nn_basis = total\nd = 2\ndelta = 0.05\nC = 2.5\ntrials = 17\nmaster_seed = 18446744073709551615\nquantile_levels = 0.5,0.95\n";
        let c = parse_config(text).unwrap();
        assert_eq!(parse_config(&render_config(&c)).unwrap(), c);
        assert_eq!(render_config(&c), text);
    }
}
