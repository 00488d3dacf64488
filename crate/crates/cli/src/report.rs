use serde::{Deserialize, Serialize};
use serde_json::Value;

/// What kind of statement a claim is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimKind {
    /// an instance of a published statement; failure is an assertion failure
    TheoremInstance,
    /// internal consistency check; failure is an assertion failure
    Check,
    /// data with no claim attached; never fails the run
    Exploratory,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Claim {
    pub claim: String,
    pub kind: ClaimKind,
    /// primes the statement was checked at; 0 stands for Q or Z
    pub primes: Vec<u64>,
    pub holds: bool,
    pub detail: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl Claim {
    pub fn new(claim: impl Into<String>, kind: ClaimKind, holds: bool) -> Self {
        Claim { claim: claim.into(), kind, primes: Vec::new(), holds, detail: Value::Null, counterexample: None }
    }

    pub fn primes(mut self, p: &[u64]) -> Self {
        self.primes = p.to_vec();
        self
    }

    pub fn detail(mut self, d: impl Serialize) -> Self {
        self.detail = serde_json::to_value(d).unwrap_or(Value::Null);
        self
    }

    pub fn counterexample(mut self, c: impl Serialize) -> Self {
        self.counterexample = serde_json::to_value(c).ok();
        self
    }

    pub fn failed_assertion(&self) -> bool {
        !self.holds && self.kind != ClaimKind::Exploratory
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub version: String,
    pub seed: u64,
    pub result: Value,
    pub provenance: Vec<Claim>,
}

impl Report {
    pub fn new(command: &str, n: Option<usize>, seed: u64, result: impl Serialize) -> Self {
        Report {
            command: command.to_string(),
            n,
            version: pointring_core::CODE_VERSION.to_string(),
            seed,
            result: serde_json::to_value(result).unwrap_or(Value::Null),
            provenance: Vec::new(),
        }
    }

    pub fn claim(mut self, c: Claim) -> Self {
        self.provenance.push(c);
        self
    }

    pub fn passed(&self) -> bool {
        !self.provenance.iter().any(Claim::failed_assertion)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{}", self.command));
        if let Some(n) = self.n {
            out.push_str(&format!(" n={n}"));
        }
        out.push_str(&format!(" (version {}, seed {})\n", self.version, self.seed));
        text_value(&self.result, 1, &mut out);
        for c in &self.provenance {
            let tag = match (c.holds, c.kind) {
                (true, _) => "ok",
                (false, ClaimKind::Exploratory) => "note",
                (false, _) => "FAIL",
            };
            let over = if c.primes.is_empty() {
                String::new()
            } else {
                let ps: Vec<String> =
                    c.primes.iter().map(|&p| if p == 0 { "char 0".into() } else { format!("F_{p}") }).collect();
                format!(" [{}]", ps.join(", "))
            };
            let kind = match c.kind {
                ClaimKind::TheoremInstance => "theorem instance",
                ClaimKind::Check => "check",
                ClaimKind::Exploratory => "exploratory",
            };
            out.push_str(&format!("{tag:>4}  {} ({kind}){over}\n", c.claim));
            if let Some(ce) = &c.counterexample {
                out.push_str(&format!("      counterexample: {ce}\n"));
            }
        }
        out
    }
}

fn text_value(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        text_value(x, depth + 1, out);
                    }
                    Value::Array(a) if a.len() > 12 || a.iter().any(Value::is_object) => {
                        out.push_str(&format!("{pad}{k}: [{} entries; --format json for all]\n", a.len()));
                    }
                    _ => {
                        let mut t = x.to_string();
                        if t.len() > 160 {
                            t = format!("{}…", t.chars().take(157).collect::<String>());
                        }
                        out.push_str(&format!("{pad}{k}: {t}\n"))
                    }
                }
            }
        }
        Value::Null => {}
        other => out.push_str(&format!("{pad}{other}\n")),
    }
}
