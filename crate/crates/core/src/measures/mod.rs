//! Graph-level controversy measures.

pub mod bcc;
pub mod betweenness;
pub mod ec;
pub mod gmck;
pub mod layout;
pub mod mblb;
pub mod rwc;

pub use bcc::{bcc, BccScore};
pub use betweenness::{edge_betweenness, EdgeBetweenness};
pub use ec::ec;
pub use gmck::{gmck, GmckScore};
pub use layout::{force_layout, Point};
pub use mblb::{mblb, mblb_with_seeds, MblbScore};
pub use rwc::{rwc_mc, rwc_rwr, RwrScore};

use serde::{Deserialize, Serialize};

/// Selectable measure names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    RwcMc,
    RwcRwr,
    Bcc,
    Ec,
    Gmck,
    Mblb,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::RwcMc,
        Measure::RwcRwr,
        Measure::Bcc,
        Measure::Ec,
        Measure::Gmck,
        Measure::Mblb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::RwcMc => "rwc_mc",
            Measure::RwcRwr => "rwc_rwr",
            Measure::Bcc => "bcc",
            Measure::Ec => "ec",
            Measure::Gmck => "gmck",
            Measure::Mblb => "mblb",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s || (s == "rwc" && *m == Measure::RwcRwr))
            .ok_or_else(|| crate::Error::Input(format!("unknown measure '{s}'")))
    }
}
