//! Egocentric network trial data: generation and CSV round-tripping.

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::rng::{stream_rng, StreamTag};
use crate::error::{invalid, Error, Result};
use crate::model::{DesignParams, ModelCoefficients};

/// `K` egonetworks of one index participant and `n` members each.
///
/// Outcomes are stored flat, network by network, index first. Only the
/// index participant can be treated; members are exposed through it.
#[derive(Debug, Clone, PartialEq)]
pub struct EgoNetworkDataset {
    n: usize,
    ids: Vec<u64>,
    treated: Vec<bool>,
    y: Vec<f64>,
}

/// A borrowed view of one egonetwork.
#[derive(Debug, Clone, Copy)]
pub struct Network<'a> {
    pub id: u64,
    /// `z_1k`; members have `z = 0` and `g = z_1k`.
    pub treated: bool,
    /// Index outcome followed by the `n` member outcomes.
    pub y: &'a [f64],
}

impl Network<'_> {
    pub fn index_outcome(&self) -> f64 {
        self.y[0]
    }

    pub fn member_outcomes(&self) -> &[f64] {
        &self.y[1..]
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    network_id: u64,
    unit_id: usize,
    role: String,
    z: u8,
    g: u8,
    y: f64,
}

impl EgoNetworkDataset {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ids: Vec::new(),
            treated: Vec::new(),
            y: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize, k: usize) -> Self {
        Self {
            n,
            ids: Vec::with_capacity(k),
            treated: Vec::with_capacity(k),
            y: Vec::with_capacity(k * (n + 1)),
        }
    }

    /// Appends a network. `y` holds the index outcome then `n` member outcomes.
    pub fn push(&mut self, id: u64, treated: bool, y: &[f64]) -> Result<()> {
        if y.len() != self.n + 1 {
            return Err(Error::Format(format!(
                "network {id} has {} units, expected {}",
                y.len(),
                self.n + 1
            )));
        }
        self.ids.push(id);
        self.treated.push(treated);
        self.y.extend_from_slice(y);
        Ok(())
    }

    /// Members per network.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of egonetworks.
    pub fn k(&self) -> usize {
        self.ids.len()
    }

    pub fn n_treated(&self) -> usize {
        self.treated.iter().filter(|&&t| t).count()
    }

    pub fn network(&self, i: usize) -> Network<'_> {
        let w = self.n + 1;
        Network {
            id: self.ids[i],
            treated: self.treated[i],
            y: &self.y[i * w..(i + 1) * w],
        }
    }

    pub fn networks(&self) -> impl Iterator<Item = Network<'_>> + '_ {
        (0..self.k()).map(move |i| self.network(i))
    }

    /// Writes one row per unit with header `network_id,unit_id,role,z,g,y`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for net in self.networks() {
            let t = u8::from(net.treated);
            for (unit, &y) in net.y.iter().enumerate() {
                let index = unit == 0;
                w.serialize(CsvRow {
                    network_id: net.id,
                    unit_id: unit,
                    role: if index { "index" } else { "member" }.to_string(),
                    z: if index { t } else { 0 },
                    g: if index { 0 } else { t },
                    y,
                })?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format written by [`write_csv`](Self::write_csv). Rows of a
    /// network must be contiguous with the index first; all networks must have
    /// the same number of members.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["network_id", "unit_id", "role", "z", "g", "y"];
        if headers.iter().ne(expected) {
            return Err(Error::Format(format!(
                "expected header {}, found {}",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }

        let mut groups: Vec<(u64, bool, Vec<f64>)> = Vec::new();
        for (line, row) in rdr.deserialize::<CsvRow>().enumerate() {
            let row = row?;
            let at = || format!("data row {}", line + 1);
            if !row.y.is_finite() {
                return Err(Error::Format(format!("{}: outcome is not finite", at())));
            }
            if row.z > 1 || row.g > 1 {
                return Err(Error::Format(format!("{}: z and g must be 0 or 1", at())));
            }
            match row.role.as_str() {
                "index" => {
                    if row.g != 0 {
                        return Err(Error::Format(format!("{}: index unit with g = 1", at())));
                    }
                    if groups.iter().any(|g| g.0 == row.network_id) {
                        return Err(Error::Format(format!(
                            "{}: network {} appears twice",
                            at(),
                            row.network_id
                        )));
                    }
                    groups.push((row.network_id, row.z == 1, vec![row.y]));
                }
                "member" => {
                    let Some(last) = groups.last_mut().filter(|g| g.0 == row.network_id) else {
                        return Err(Error::Format(format!(
                            "{}: member of network {} before its index row",
                            at(),
                            row.network_id
                        )));
                    };
                    if row.z != 0 {
                        return Err(Error::Format(format!("{}: treated network member", at())));
                    }
                    if (row.g == 1) != last.1 {
                        return Err(Error::Format(format!(
                            "{}: member exposure disagrees with index assignment",
                            at()
                        )));
                    }
                    last.2.push(row.y);
                }
                other => {
                    return Err(Error::Format(format!("{}: unknown role `{other}`", at())));
                }
            }
        }

        let n = groups.first().map_or(0, |g| g.2.len() - 1);
        let mut data = Self::with_capacity(n, groups.len());
        for (id, treated, y) in groups {
            data.push(id, treated, &y)?;
        }
        Ok(data)
    }
}

/// Draws replicate `replicate` of a trial with `k` egonetworks.
pub fn generate_replicate(
    design: &DesignParams,
    k: usize,
    truth: &ModelCoefficients,
    seed: u64,
    replicate: u64,
) -> Result<EgoNetworkDataset> {
    design.validate()?;
    let n = design.integer_n()?;
    if k == 0 {
        return Err(invalid("k", 0.0, "need at least one egonetwork"));
    }
    let sd_u = design.sigma2_u().sqrt();
    let sd_e = design.sigma2_e().sqrt();
    let mut data = EgoNetworkDataset::with_capacity(n, k);
    let mut y = vec![0.0; n + 1];
    for net in 0..k {
        let mut rng = stream_rng(seed, replicate, net as u64, StreamTag::Network);
        let treated = rng.random_bool(design.p);
        let u: f64 = rng.sample::<f64, _>(StandardNormal) * sd_u;
        let z = if treated { 1.0 } else { 0.0 };
        for (unit, slot) in y.iter_mut().enumerate() {
            let e: f64 = rng.sample::<f64, _>(StandardNormal) * sd_e;
            let effect = if unit == 0 { truth.tau } else { truth.delta };
            *slot = truth.gamma + effect * z + u + e;
        }
        data.push(net as u64, treated, &y)?;
    }
    Ok(data)
}

/// Draws one trial with `k` egonetworks from the random-intercept model.
pub fn generate_dataset(
    design: &DesignParams,
    k: usize,
    truth: &ModelCoefficients,
    seed: u64,
) -> Result<EgoNetworkDataset> {
    generate_replicate(design, k, truth, seed, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> DesignParams {
        DesignParams::new(2.0, 0.5, 0.1, 1.0).unwrap()
    }

    #[test]
    fn structure_and_reproducibility() {
        let truth = ModelCoefficients::new(0.53, -0.32, -0.34);
        let a = generate_dataset(&base(), 50, &truth, 9).unwrap();
        let b = generate_dataset(&base(), 50, &truth, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.k(), 50);
        assert_eq!(a.n(), 2);
        assert!(a.networks().all(|net| net.y.len() == 3));
        let c = generate_dataset(&base(), 50, &truth, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn prefix_property() {
        // Network draws depend only on (seed, replicate, network).
        let truth = ModelCoefficients::default();
        let small = generate_dataset(&base(), 10, &truth, 3).unwrap();
        let large = generate_dataset(&base(), 40, &truth, 3).unwrap();
        for i in 0..10 {
            assert_eq!(small.network(i).y, large.network(i).y);
        }
    }

    #[test]
    fn rejects_fractional_network_size() {
        let d = base().with_n(1.5);
        assert!(generate_dataset(&d, 10, &ModelCoefficients::default(), 1).is_err());
        assert!(generate_dataset(&base(), 0, &ModelCoefficients::default(), 1).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let data = generate_dataset(&base(), 7, &ModelCoefficients::new(1.0, 2.0, 3.0), 5).unwrap();
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("network_id,unit_id,role,z,g,y\n"));
        assert_eq!(text.lines().count(), 1 + 7 * 3);
        let back = EgoNetworkDataset::read_csv(&buf[..]).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn csv_rejects_broken_structure() {
        let bad_member_z = "network_id,unit_id,role,z,g,y\n0,0,index,1,0,1.0\n0,1,member,1,1,2.0\n";
        assert!(EgoNetworkDataset::read_csv(bad_member_z.as_bytes()).is_err());
        let bad_g = "network_id,unit_id,role,z,g,y\n0,0,index,1,0,1.0\n0,1,member,0,0,2.0\n";
        assert!(EgoNetworkDataset::read_csv(bad_g.as_bytes()).is_err());
        let ragged = "network_id,unit_id,role,z,g,y\n0,0,index,1,0,1\n0,1,member,0,1,2\n1,0,index,0,0,1\n";
        assert!(EgoNetworkDataset::read_csv(ragged.as_bytes()).is_err());
        let orphan = "network_id,unit_id,role,z,g,y\n0,1,member,0,1,2\n";
        assert!(EgoNetworkDataset::read_csv(orphan.as_bytes()).is_err());
        let header = "id,unit,role,z,g,y\n";
        assert!(EgoNetworkDataset::read_csv(header.as_bytes()).is_err());
    }
}
