//! Structured pass/fail reports that render to plain text.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Holds or fails only in a finite-stage sense; never counts as a failure.
    Caveat,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Caveat => "caveat",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub claim: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub claims: Vec<Claim>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), ..Default::default() }
    }

    pub fn check(&mut self, claim: impl Into<String>, holds: bool, witness: Option<String>) -> bool {
        let verdict = if holds { Verdict::Pass } else { Verdict::Fail };
        self.claims.push(Claim { claim: claim.into(), verdict, witness });
        holds
    }

    pub fn caveat(&mut self, claim: impl Into<String>, witness: Option<String>) {
        self.claims.push(Claim { claim: claim.into(), verdict: Verdict::Caveat, witness });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    pub fn find(&self, claim_prefix: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.claim.starts_with(claim_prefix))
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.claims {
            write!(f, "  [{}] {}", c.verdict, c.claim)?;
            if let Some(w) = &c.witness {
                write!(f, " ({w})")?;
            }
            writeln!(f)?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
