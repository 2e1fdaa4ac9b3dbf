//! Verification reports shared by every suite.

use serde::{Deserialize, Serialize};

use crate::forms::HwvId;

/// Grid coordinates of a report item. Checks that do not depend on every parameter
/// leave the rest empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ItemId {
    pub n: u8,
    pub r: Option<u8>,
    pub k: Option<i8>,
    pub m: Option<u32>,
}

impl ItemId {
    pub fn dim(n: u8) -> Self {
        ItemId {
            n,
            r: None,
            k: None,
            m: None,
        }
    }

    pub fn rk(n: u8, r: u8, k: i8) -> Self {
        ItemId {
            n,
            r: Some(r),
            k: Some(k),
            m: None,
        }
    }
}

impl From<HwvId> for ItemId {
    fn from(id: HwvId) -> Self {
        ItemId {
            n: id.n,
            r: Some(id.r),
            k: Some(id.k),
            m: Some(id.m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportItem {
    pub id: ItemId,
    pub suite: String,
    /// Name of the check within the suite.
    pub check: String,
    pub expected: String,
    pub computed: String,
    pub status: Status,
}

impl ReportItem {
    pub fn new(
        id: impl Into<ItemId>,
        suite: &str,
        check: &str,
        expected: impl ToString,
        computed: impl ToString,
        pass: bool,
    ) -> Self {
        ReportItem {
            id: id.into(),
            suite: suite.into(),
            check: check.into(),
            expected: expected.to_string(),
            computed: computed.to_string(),
            status: if pass { Status::Pass } else { Status::Fail },
        }
    }

    /// An item whose expected and computed renderings must agree.
    pub fn compare(
        id: impl Into<ItemId>,
        suite: &str,
        check: &str,
        expected: impl ToString,
        computed: impl ToString,
    ) -> Self {
        let (e, c) = (expected.to_string(), computed.to_string());
        let pass = e == c;
        Self::new(id, suite, check, e, c, pass)
    }

    /// An item that failed with an error before producing a value.
    pub fn error(
        id: impl Into<ItemId>,
        suite: &str,
        check: &str,
        expected: impl ToString,
        err: impl std::fmt::Display,
    ) -> Self {
        Self::new(id, suite, check, expected, format!("error: {err}"), false)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub command: String,
    pub params: serde_json::Value,
    pub items: Vec<ReportItem>,
    pub summary: Summary,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    /// Sorts the items by `(n, r, k, m)`, then suite and check, and counts them.
    pub fn new(
        command: String,
        params: serde_json::Value,
        mut items: Vec<ReportItem>,
        elapsed_ms: u64,
    ) -> Self {
        items.sort_by(|a, b| (a.id, &a.suite, &a.check).cmp(&(b.id, &b.suite, &b.check)));
        let pass = items.iter().filter(|i| i.passed()).count();
        let summary = Summary {
            pass,
            fail: items.len() - pass,
        };
        VerificationReport {
            command,
            params,
            items,
            summary,
            elapsed_ms,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportItem> {
        self.items.iter().filter(|i| !i.passed())
    }
}
