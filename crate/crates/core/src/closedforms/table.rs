use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use super::{
    expected_vertices, hyp3f2_unit, mean_cw_crosspolytope, mean_cw_simplex, vertex_probability_3d,
};
use crate::polytopes::PolytopeKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    /// Computed here from a closed form.
    Exact,
    /// Only a printed decimal is known; the value is that decimal.
    PaperNumericOnly,
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub key: String,
    pub value: f64,
    pub formula: String,
    pub status: Status,
    /// The published decimal expansion, digits as printed (truncated).
    pub printed: Option<String>,
}

impl Entry {
    /// Distance from the printed decimal in units of its last printed digit.
    pub fn printed_discrepancy(&self) -> Option<f64> {
        let printed = self.printed.as_deref()?;
        let v: f64 = printed.parse().ok()?;
        let decimals = printed.split_once('.').map_or(0, |(_, frac)| frac.len());
        let ulp = 10f64.powi(-(decimals as i32));
        Some((self.value - v).abs() / ulp)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceTable {
    pub entries: Vec<Entry>,
}

impl ReferenceTable {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.get(key).map(|e| e.value)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact entries whose computed value differs from the printed decimal by
    /// more than one unit in its last digit (printed values are truncated).
    pub fn printed_mismatches(&self) -> Vec<&Entry> {
        self.entries
            .iter()
            .filter(|e| e.status == Status::Exact)
            .filter(|e| e.printed_discrepancy().is_some_and(|d| d > 1.0))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let kw = self.entries.iter().map(|e| e.key.len()).max().unwrap_or(3).max(3);
        let fw = self.entries.iter().map(|e| e.formula.chars().count()).max().unwrap_or(7).max(7);
        let mut out = format!(
            "{:<kw$}  {:<fw$}  {:>24}  {}\n",
            "key", "formula", "value", "status"
        );
        for e in &self.entries {
            let pad = fw - e.formula.chars().count();
            out.push_str(&format!(
                "{:<kw$}  {}{}  {:>24}  {:?}\n",
                e.key,
                e.formula,
                " ".repeat(pad),
                format!("{:.17}", e.value),
                e.status
            ));
        }
        out
    }
}

/// Body prefixes used in entry keys.
pub fn body_key(kind: PolytopeKind, dim: usize) -> &'static str {
    match (kind, dim) {
        (PolytopeKind::Simplex, 3) => "tetra3",
        (PolytopeKind::Cube, 3) => "cube3",
        (PolytopeKind::Crosspolytope, 3) => "octa3",
        (PolytopeKind::Simplex, 4) => "simplex4",
        (PolytopeKind::Cube, 4) => "cube4",
        (PolytopeKind::Crosspolytope, 4) => "cross4",
        (PolytopeKind::Square, 2) => "square2",
        (PolytopeKind::Triangle, 2) => "triangle2",
        _ => "unknown",
    }
}

struct Builder(Vec<Entry>);

impl Builder {
    fn exact(&mut self, key: &str, value: f64, formula: &str, printed: Option<&str>) {
        self.0.push(Entry {
            key: key.into(),
            value,
            formula: formula.into(),
            status: Status::Exact,
            printed: printed.map(Into::into),
        });
    }

    fn numeric(&mut self, key: &str, printed: &str) {
        self.0.push(Entry {
            key: key.into(),
            value: printed.parse().expect("printed decimal"),
            formula: "numeric only".into(),
            status: Status::PaperNumericOnly,
            printed: Some(printed.into()),
        });
    }
}

fn correlation(m: [f64; 5]) -> f64 {
    let [cw, cw2, pw, pw2, cwpw] = m;
    (cwpw - cw * pw) / ((cw2 - cw * cw) * (pw2 - pw * pw)).sqrt()
}

fn build() -> ReferenceTable {
    let a3 = (1.0f64 / 3.0).acos();
    let a4 = 0.25f64.acos();
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let f32 = hyp3f2_unit(-0.5, 0.5, 1.5, 1.0, 2.0).expect("convergent series");
    let ev = |k, d| expected_vertices(k, d).expect("supported body");
    let p3d = |k, n| vertex_probability_3d(k, n).expect("3-body");

    let mut b = Builder(Vec::new());
    b.exact("const.arcsec3", a3, "arcsec(3)", None);
    b.exact("const.arcsec4", a4, "arcsec(4)", None);
    b.exact("const.hyp3f2", f32, "3F2(-1/2,1/2,3/2;1,2;1)", None);

    // tetrahedron
    b.exact("tetra3.E_cw", s3 / 4.0, "√3/4", Some("0.433012701892219"));
    b.exact(
        "tetra3.E_cw2",
        0.125 + s2 / (4.0 * PI) - a3 / (8.0 * PI),
        "1/8 + √2/(4π) − arcsec(3)/(8π)",
        Some("0.188561220515812"),
    );
    b.exact("tetra3.E_pw", 1.5 * (PI - a3), "(3/2)(π − arcsec 3)", Some("2.865949854373527"));
    b.numeric("tetra3.E_pw2", "8.2170808733");
    b.numeric("tetra3.E_cwpw", "1.2406348222");
    b.numeric("tetra3.corr", "-0.188");
    b.exact("tetra3.E_w", 1.5 * (PI - a3) / PI, "E(pw)/π", None);
    b.exact("tetra3.p3", p3d(PolytopeKind::Simplex, 3), "(2/π)(3 arcsec 3 − π)", Some("0.3509593121"));
    b.exact("tetra3.p4", p3d(PolytopeKind::Simplex, 4), "(3/π)(π − 2 arcsec 3)", Some("0.6490406878"));
    b.exact("tetra3.EV", ev(PolytopeKind::Simplex, 3), "3 p3 + 4 p4", None);

    // cube
    let cube3 = [1.5, 1.0 + 4.0 / PI, 1.5 * PI, 8.0 + 6.0 * PI * f32, 2.0 + 16.0 / PI];
    b.exact("cube3.E_cw", cube3[0], "3/2", Some("1.5"));
    b.exact("cube3.E_cw2", cube3[1], "1 + 4/π", Some("2.273239544735162"));
    b.exact("cube3.E_pw", cube3[2], "3π/2", Some("4.712388980384689"));
    b.exact("cube3.E_pw2", cube3[3], "8 + 6π 3F2(-1/2,1/2,3/2;1,2;1)", Some("22.23711743343947"));
    b.exact("cube3.E_cwpw", cube3[4], "2 + 16/π", Some("7.09295817894065"));
    b.exact("cube3.corr", correlation(cube3), "from the five exact moments", Some("0.915"));
    b.exact("cube3.E_w", 1.5, "E(pw)/π", None);
    b.exact("cube3.p6", 1.0, "1 (almost surely)", None);
    b.exact("cube3.EV", ev(PolytopeKind::Cube, 3), "6", None);

    // octahedron
    b.exact("octa3.E_cw", s3 / 2.0, "√3/2", Some("0.866025403784438"));
    b.exact(
        "octa3.E_cw2",
        0.5 + s2 / PI - a3 / (2.0 * PI),
        "1/2 + √2/π − arcsec(3)/(2π)",
        Some("0.754244882063249"),
    );
    b.exact("octa3.E_pw", 3.0 * a3, "3 arcsec 3", Some("3.692878252022324"));
    b.numeric("octa3.E_pw2", "13.6639421274");
    b.numeric("octa3.E_cwpw", "3.2074623048");
    b.numeric("octa3.corr", "0.878");
    b.exact("octa3.E_w", 3.0 * a3 / PI, "E(pw)/π", None);
    b.exact("octa3.p4", p3d(PolytopeKind::Crosspolytope, 4), "(3/π)(π − 2 arcsec 3)", Some("0.6490406878"));
    b.exact("octa3.p6", p3d(PolytopeKind::Crosspolytope, 6), "(2/π)(3 arcsec 3 − π)", Some("0.3509593121"));
    b.exact("octa3.EV", ev(PolytopeKind::Crosspolytope, 3), "4 p4 + 6 p6", None);

    // 4-simplex
    let s4_cw = 5.0 * s3 / (12.0 * PI) * (PI - a4);
    debug_assert!((s4_cw - mean_cw_simplex(4).unwrap()).abs() < 1e-12);
    b.exact("simplex4.E_cw", s4_cw, "5√3/(12π)(π − arcsec 4)", Some("0.418889720727840"));
    b.numeric("simplex4.E_cw2", "0.176");
    b.exact("simplex4.E_pw", 10.0 / (3.0 * PI) * (2.0 * PI - 3.0 * a3), "10/(3π)(2π − 3 arcsec 3)", Some("2.748401146360593"));
    b.numeric("simplex4.E_pw2", "7.56");
    b.numeric("simplex4.E_cwpw", "1.15");
    b.numeric("simplex4.corr", "0.1");
    b.numeric("simplex4.p3", "0.146");
    b.numeric("simplex4.p4", "0.585");
    b.numeric("simplex4.p5", "0.269");
    b.exact("simplex4.EV", ev(PolytopeKind::Simplex, 4), "10(1 − 3/(2π) arcsec 3)", Some("4.122"));

    // 4-cube
    b.exact("cube4.E_cw", 2.0, "n/2", Some("2"));
    b.numeric("cube4.E_cw2", "4.04");
    b.exact("cube4.E_pw", 16.0 / 3.0, "16/3", None);
    b.numeric("cube4.E_pw2", "28.4");
    b.numeric("cube4.E_cwpw", "10.7");
    b.numeric("cube4.corr", "0.9");
    b.exact("cube4.p8", 1.0, "1 (almost surely)", None);
    b.exact("cube4.EV", ev(PolytopeKind::Cube, 4), "8", None);

    // 4-crosspolytope
    let c4_cw = 4.0 * s3 / 9.0;
    debug_assert!((c4_cw - mean_cw_crosspolytope(4).unwrap()).abs() < 1e-12);
    b.exact("cross4.E_cw", c4_cw, "4√3/9", Some("0.769800358919501"));
    b.numeric("cross4.E_cw2", "0.598");
    b.exact("cross4.E_pw", 16.0 / PI * (PI - 2.0 * a3), "(16/π)(π − 2 arcsec 3)", Some("3.461550335020567"));
    b.numeric("cross4.E_pw2", "12.0");
    b.numeric("cross4.E_cwpw", "2.67");
    b.numeric("cross4.corr", "0.8");
    b.numeric("cross4.p4", "0.463");
    b.numeric("cross4.p6", "0.478");
    b.numeric("cross4.p8", "0.059");
    b.exact("cross4.EV", ev(PolytopeKind::Crosspolytope, 4), "24(1 − (2/π) arcsec 3)", Some("5.192"));

    ReferenceTable { entries: b.0 }
}

/// The table of exact and published constants, built once.
pub fn reference_table() -> &'static ReferenceTable {
    static TABLE: OnceLock<ReferenceTable> = OnceLock::new();
    TABLE.get_or_init(build)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_size_and_keys() {
        let t = reference_table();
        assert!(t.len() >= 30);
        for body in ["tetra3", "cube3", "octa3", "simplex4", "cube4", "cross4"] {
            for m in ["E_cw", "E_cw2", "E_pw", "E_pw2", "E_cwpw", "corr", "EV"] {
                assert!(t.get(&format!("{body}.{m}")).is_some(), "{body}.{m}");
            }
        }
    }

    #[test]
    fn examples() {
        let t = reference_table();
        let e = t.get("cube3.E_pw").unwrap();
        assert!((e.value - 4.712388980384689).abs() < 1e-15);
        let e = t.get("tetra3.E_pw2").unwrap();
        assert_eq!(e.status, Status::PaperNumericOnly);
        assert_eq!(e.value, 8.2170808733);
        let e = t.get("cube3.corr").unwrap();
        assert_eq!(e.status, Status::Exact);
        assert!(e.value > 0.915 && e.value < 0.916);
    }

    #[test]
    fn printed_decimals_agree() {
        let t = reference_table();
        let bad: Vec<_> = t.printed_mismatches().iter().map(|e| (&e.key, e.value)).collect();
        assert!(bad.is_empty(), "{bad:?}");
    }

    #[test]
    fn mean_width_relation() {
        let t = reference_table();
        for body in ["tetra3", "cube3", "octa3"] {
            let pw = t.value(&format!("{body}.E_pw")).unwrap();
            let w = t.value(&format!("{body}.E_w")).unwrap();
            assert!((pw - PI * w).abs() < 1e-14);
        }
        // cube mean width 3/2 is the classical value for the unit cube
        assert_eq!(t.value("cube3.E_w").unwrap(), 1.5);
    }

    #[test]
    fn text_rendering_lists_every_entry() {
        let t = reference_table();
        let text = t.to_text();
        assert_eq!(text.lines().count(), t.len() + 1);
        assert!(text.contains("2.74840114636059"));
    }
}
