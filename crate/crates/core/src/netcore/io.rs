//! `nodes.csv` / `edges.csv` network file pair.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::Network;

pub const NODES_FILE: &str = "nodes.csv";
pub const EDGES_FILE: &str = "edges.csv";

pub(crate) fn check_header(rdr: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = rdr.headers()?;
    if header.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::Format(format!(
            "expected header {}, found {}",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

pub(crate) fn parse_field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    idx: usize,
    name: &str,
) -> Result<T> {
    let raw = rec
        .get(idx)
        .ok_or_else(|| Error::Format(format!("missing field {name}")))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::Format(format!("bad {name} value {raw:?}")))
}

pub fn read_network_from<R1: Read, R2: Read>(nodes: R1, edges: R2) -> Result<Network> {
    let mut rdr = csv::Reader::from_reader(nodes);
    check_header(&mut rdr, &["id", "infected"])?;
    let mut infected: Vec<Option<bool>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let id: usize = parse_field(&rec, 0, "id")?;
        let z: u8 = parse_field(&rec, 1, "infected")?;
        if z > 1 {
            return Err(Error::Format(format!("infected must be 0 or 1, got {z}")));
        }
        if id >= infected.len() {
            infected.resize(id + 1, None);
        }
        if infected[id].replace(z == 1).is_some() {
            return Err(Error::Format(format!("node id {id} listed twice")));
        }
    }
    let infected = infected
        .into_iter()
        .enumerate()
        .map(|(id, z)| z.ok_or_else(|| Error::Format(format!("node ids not contiguous: {id} missing"))))
        .collect::<Result<Vec<_>>>()?;

    let mut rdr = csv::Reader::from_reader(edges);
    check_header(&mut rdr, &["u", "v"])?;
    let mut list = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        list.push((parse_field(&rec, 0, "u")?, parse_field(&rec, 1, "v")?));
    }
    Network::from_edges(infected, list)
}

pub fn write_network_to<W1: Write, W2: Write>(net: &Network, nodes: W1, edges: W2) -> Result<()> {
    let mut w = csv::Writer::from_writer(nodes);
    w.write_record(["id", "infected"])?;
    for i in 0..net.node_count() {
        w.write_record([i.to_string(), u8::from(net.is_infected(i)).to_string()])?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_writer(edges);
    w.write_record(["u", "v"])?;
    for (u, v) in net.edges() {
        w.write_record([u.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Read `nodes.csv` and `edges.csv` from a directory.
pub fn read_network(dir: &Path) -> Result<Network> {
    let nodes = std::fs::File::open(dir.join(NODES_FILE))?;
    let edges = std::fs::File::open(dir.join(EDGES_FILE))?;
    read_network_from(nodes, edges)
}

/// Write `nodes.csv` and `edges.csv` into a directory, creating it if needed.
pub fn write_network(net: &Network, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let nodes = std::fs::File::create(dir.join(NODES_FILE))?;
    let edges = std::fs::File::create(dir.join(EDGES_FILE))?;
    write_network_to(net, nodes, edges)
}
