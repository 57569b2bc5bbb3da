//! The JSON input schema: a framed link plus either a Conway table or a PD code.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tsw_core::diagram::{normalize_to_table, parse_pd};
use tsw_core::linkdata::{subset_key, ConwayTable, EntryJson, FramedLink};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<String>>,
    /// Diagonal entries are the framings.
    pub linking_matrix: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conway: Option<BTreeMap<String, EntryJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pd: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge: Option<Vec<i64>>,
}

pub struct Loaded {
    pub link: FramedLink,
    pub table: ConwayTable,
    pub charge: Option<Vec<i64>>,
    /// Sublinks whose Conway sign could not be fixed (PD input only).
    pub ambiguous: Vec<String>,
}

pub fn read(path: &Path) -> Result<LinkInput> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn load(path: &Path) -> Result<Loaded> {
    resolve(read(path)?)
}

pub fn resolve(inp: LinkInput) -> Result<Loaded> {
    let m = inp.linking_matrix.len();
    let names = inp.components.clone().unwrap_or_else(|| (1..=m).map(|i| format!("L{i}")).collect());
    let link = FramedLink::new(names, inp.linking_matrix.clone())?;
    let (table, ambiguous) = match (&inp.conway, &inp.pd) {
        (Some(c), None) => (ConwayTable::from_json(m, c)?, Vec::new()),
        (None, Some(pd)) => {
            let d = parse_pd(pd)?;
            if d.m() != m {
                bail!(tsw_core::Error::InvalidInput(format!("PD code has {} components, linking matrix {m}", d.m())));
            }
            let lk = d.linking_matrix();
            for i in 0..m {
                for j in 0..m {
                    if i != j && lk[i][j] != link.lk(i, j) {
                        bail!(tsw_core::Error::InvalidInput(format!(
                            "linking number of components {} and {} is {} in the diagram, {} in the matrix",
                            i + 1,
                            j + 1,
                            lk[i][j],
                            link.lk(i, j)
                        )));
                    }
                }
            }
            let n = normalize_to_table(&d)?;
            (n.table, n.ambiguous.iter().map(|s| subset_key(s)).collect())
        }
        _ => bail!(tsw_core::Error::InvalidInput("exactly one of \"conway\" and \"pd\" is required".into())),
    };
    Ok(Loaded { link, table, charge: inp.charge, ambiguous })
}

/// Input document for a link and table, as written by `tsw library`.
pub fn document(link: &FramedLink, table: &ConwayTable, charge: Option<Vec<i64>>) -> LinkInput {
    LinkInput {
        components: Some(link.names().to_vec()),
        linking_matrix: link.linking_matrix().clone(),
        conway: Some(table.to_json()),
        pd: None,
        charge,
    }
}
