//! Bundled example models.

use crate::dispace::Model;

/// Document text of every bundled model, by name.
pub const BUNDLED: [(&str, &str); 5] = [
    ("FIG1X", include_str!("../models/fig1x.json")),
    ("FIG1Y", include_str!("../models/fig1y.json")),
    ("SWISS1", include_str!("../models/swiss1.json")),
    ("HOLLOW3", include_str!("../models/hollow3.json")),
    ("SQUARE", include_str!("../models/square.json")),
];

/// Parses a bundled model. Panics on an unknown name.
pub fn load(name: &str) -> Model {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .unwrap_or_else(|| panic!("no bundled model {name}"));
    Model::parse(text, None).expect("bundled models parse")
}

pub fn all() -> Vec<Model> {
    BUNDLED.iter().map(|(n, _)| load(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_models_parse_on_the_halved_grid() {
        let x = load("FIG1X");
        assert_eq!(x.space.bounds(), &[8, 8]);
        assert_eq!(x.point("beta_prime").unwrap(), &[6, 8]);
        let a = x.subspace.as_ref().unwrap();
        assert_eq!(a.sub_bounds(), (&[0, 0][..], &[3, 3][..]));
        assert_eq!(load("FIG1Y").space.bounds(), &[5, 5]);
        assert_eq!(load("SWISS1").space.bounds(), &[4, 4]);
        assert_eq!(load("HOLLOW3").space.bounds(), &[3, 3, 3]);
        assert_eq!(all().len(), BUNDLED.len());
    }
}
