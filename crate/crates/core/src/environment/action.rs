use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::astro::{CartesianState, Epoch, Vector3};
use crate::scenario::Scenario;
use crate::{Error, Result};

pub const ROWS: usize = 4;
/// Number of scalars in a flattened table: (dv_x, dv_y, dv_z, t) per row.
pub const PARAMS: usize = 4 * ROWS;

/// One impulsive burn: inertial ΔV in m/s applied at epoch `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "ManeuverRow", into = "ManeuverRow")]
pub struct Maneuver {
    pub dv: Vector3,
    pub t: Epoch,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManeuverRow {
    dv_x_mps: f64,
    dv_y_mps: f64,
    dv_z_mps: f64,
    t_mjd2000: Epoch,
}

impl From<ManeuverRow> for Maneuver {
    fn from(r: ManeuverRow) -> Self {
        Maneuver {
            dv: Vector3::new(r.dv_x_mps, r.dv_y_mps, r.dv_z_mps),
            t: r.t_mjd2000,
        }
    }
}

impl From<Maneuver> for ManeuverRow {
    fn from(m: Maneuver) -> Self {
        ManeuverRow {
            dv_x_mps: m.dv.x,
            dv_y_mps: m.dv.y,
            dv_z_mps: m.dv.z,
            t_mjd2000: m.t,
        }
    }
}

impl Maneuver {
    pub fn new(dv: Vector3, t: Epoch) -> Self {
        Maneuver { dv, t }
    }

    /// ΔV magnitude, m/s.
    pub fn magnitude(&self) -> f64 {
        self.dv.norm()
    }
}

/// Open-loop schedule of four burns: rows 0–1 rendezvous and dock, rows
/// 2–3 move the docked stack off the conjunction and back.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionTable {
    pub rows: [Maneuver; ROWS],
}

impl ActionTable {
    pub fn new(rows: [Maneuver; ROWS]) -> Self {
        ActionTable { rows }
    }

    /// Checks finite burns, nondecreasing times and, when given, that every
    /// burn falls inside the scenario window.
    pub fn validate(&self, scenario: Option<&Scenario>) -> Result<()> {
        for (k, m) in self.rows.iter().enumerate() {
            if !m.dv.iter().all(|x| x.is_finite()) || !m.t.mjd2000().is_finite() {
                return Err(Error::InvalidInput(format!(
                    "row {} has a non-finite entry",
                    k + 1
                )));
            }
            if let Some(s) = scenario {
                if !s.contains(m.t) {
                    return Err(Error::InvalidInput(format!(
                        "row {} epoch {} lies outside the scenario window [{}, {}]",
                        k + 1,
                        m.t,
                        s.start,
                        s.end
                    )));
                }
            }
        }
        if self.rows.windows(2).any(|w| w[1].t < w[0].t) {
            return Err(Error::InvalidInput(
                "action table times must be nondecreasing".into(),
            ));
        }
        Ok(())
    }

    pub fn docking_rows(&self) -> &[Maneuver] {
        &self.rows[..2]
    }

    pub fn cam_rows(&self) -> &[Maneuver] {
        &self.rows[2..]
    }

    /// Σ|ΔV| over all rows, m/s.
    pub fn total_dv(&self) -> f64 {
        self.rows.iter().map(Maneuver::magnitude).sum()
    }

    pub fn to_params(&self) -> [f64; PARAMS] {
        let mut p = [0.0; PARAMS];
        for (k, m) in self.rows.iter().enumerate() {
            p[4 * k] = m.dv.x;
            p[4 * k + 1] = m.dv.y;
            p[4 * k + 2] = m.dv.z;
            p[4 * k + 3] = m.t.mjd2000();
        }
        p
    }

    pub fn from_params(p: &[f64]) -> Result<Self> {
        if p.len() != PARAMS {
            return Err(Error::InvalidInput(format!(
                "expected {PARAMS} parameters, got {}",
                p.len()
            )));
        }
        let mut rows = [Maneuver::new(Vector3::zeros(), Epoch::J2000_ORIGIN); ROWS];
        for (k, row) in rows.iter_mut().enumerate() {
            *row = Maneuver::new(
                Vector3::new(p[4 * k], p[4 * k + 1], p[4 * k + 2]),
                Epoch::from_mjd2000(p[4 * k + 3])?,
            );
        }
        Ok(ActionTable { rows })
    }

    /// The published schedule found from a random starting table.
    pub fn published_random_init() -> Self {
        Self::from_rows(&[
            [0.99056, 1.42753, -0.1519, 6598.9000],
            [0.19245, 0.0368, 0.2128, 6598.9704],
            [0.93575, -0.2355, -0.0597, 6600.6005],
            [-0.93575, 0.2355, 0.0597, 6600.6710],
        ])
    }

    /// The published schedule found from a Lambert starting table.
    pub fn published_lambert_init() -> Self {
        Self::from_rows(&[
            [23.90, 32.94, 24.16, 6598.90],
            [-18.82, -35.11, -25.56, 6598.97],
            [0.00, -0.69, 0.22, 6600.53],
            [-0.00, 0.69, -0.22, 6600.60],
        ])
    }

    fn from_rows(rows: &[[f64; 4]; ROWS]) -> Self {
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_params(&flat).expect("static table")
    }
}

/// Instantaneous burn: position kept, velocity changed by `dv` (m/s), fuel
/// reduced by |dv|. Fuel may go negative.
pub fn apply_maneuver(state: &CartesianState, m: &Maneuver, fuel: f64) -> (CartesianState, f64) {
    let mut out = *state;
    out.v += m.dv / 1000.0;
    (out, fuel - m.magnitude())
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    rows: Vec<Maneuver>,
    #[serde(flatten)]
    extra: serde_json::Map<String, serde_json::Value>,
}

pub fn table_to_json(
    table: &ActionTable,
    extra: serde_json::Map<String, serde_json::Value>,
) -> String {
    let file = TableFile {
        rows: table.rows.to_vec(),
        extra,
    };
    let mut s = serde_json::to_string_pretty(&file).expect("table serializes");
    s.push('\n');
    s
}

pub fn table_from_json(text: &str, origin: &Path) -> Result<ActionTable> {
    let schema = |message: String| Error::Schema {
        path: origin.to_path_buf(),
        message,
    };
    let file: TableFile = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    let rows: [Maneuver; ROWS] = file.rows.try_into().map_err(|v: Vec<Maneuver>| {
        schema(format!(
            "action table needs exactly {ROWS} rows, found {}",
            v.len()
        ))
    })?;
    let table = ActionTable { rows };
    table.validate(None).map_err(|e| schema(e.to_string()))?;
    Ok(table)
}

pub fn read_table(path: &Path) -> Result<ActionTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    table_from_json(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state() -> CartesianState {
        CartesianState::new(
            Vector3::new(7000.0, 0.0, 0.0),
            Vector3::new(0.0, 7.5, 0.0),
            Epoch::J2000_ORIGIN,
        )
    }

    #[test]
    fn zero_burn_is_identity() {
        let m = Maneuver::new(Vector3::zeros(), Epoch::J2000_ORIGIN);
        let (s, fuel) = apply_maneuver(&state(), &m, 100.0);
        assert_eq!(s, state());
        assert_eq!(fuel, 100.0);
    }

    #[test]
    fn burns_add_fuel_use() {
        let m = Maneuver::new(Vector3::new(1.0, 0.0, 0.0), Epoch::J2000_ORIGIN);
        let (s, f) = apply_maneuver(&state(), &m, 10.0);
        let (s, f) = apply_maneuver(&s, &m, f);
        assert_eq!(f, 8.0);
        assert_eq!(s.r, state().r);
        assert!((s.v.x - 0.002).abs() < 1e-15);
    }

    #[test]
    fn published_cam_pair_cancels() {
        let t = ActionTable::published_random_init();
        let (s, f) = apply_maneuver(&state(), &t.rows[2], 50.0);
        let (s, f) = apply_maneuver(&s, &t.rows[3], f);
        assert!((s.v - state().v).norm() < 1e-15);
        assert!((50.0 - f - 2.0 * t.rows[2].magnitude()).abs() < 1e-12);
    }

    #[test]
    fn params_round_trip_and_json() {
        let t = ActionTable::published_lambert_init();
        assert_eq!(ActionTable::from_params(&t.to_params()).unwrap(), t);
        let text = table_to_json(&t, serde_json::Map::new());
        assert!(text.contains("\"dv_x_mps\": 23.9"));
        assert_eq!(table_from_json(&text, Path::new("t.json")).unwrap(), t);
    }

    #[test]
    fn rejects_wrong_row_count_and_order() {
        let text = r#"{"rows": [{"dv_x_mps": 0, "dv_y_mps": 0, "dv_z_mps": 0, "t_mjd2000": 1}]}"#;
        assert!(matches!(
            table_from_json(text, Path::new("x")),
            Err(Error::Schema { .. })
        ));
        let mut t = ActionTable::published_random_init();
        t.rows.swap(0, 3);
        assert!(t.validate(None).is_err());
    }
}
