use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::quarter::Quarter;

/// Entity × quarter × indicator values; `None` marks a missing value.
///
/// Entities are kept in lexicographic order and quarters strictly
/// increasing; an (entity, quarter) cell absent from the input is all-missing.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorPanel {
    entities: Vec<String>,
    quarters: Vec<Quarter>,
    indicator_names: Vec<String>,
    values: Vec<Option<f64>>,
}

impl IndicatorPanel {
    pub fn from_rows(
        indicator_names: Vec<String>,
        rows: impl IntoIterator<Item = (String, Quarter, Vec<Option<f64>>)>,
    ) -> Result<Self> {
        let k = indicator_names.len();
        if k == 0 {
            return Err(Error::InvalidParameter("panel needs at least one indicator".into()));
        }
        let mut cells: BTreeMap<(String, Quarter), Vec<Option<f64>>> = BTreeMap::new();
        let mut quarters = BTreeSet::new();
        for (entity, q, vals) in rows {
            if vals.len() != k {
                return Err(Error::DimensionMismatch { expected: k, actual: vals.len() });
            }
            quarters.insert(q);
            if cells.insert((entity.clone(), q), vals).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate panel row ({entity}, {q})")));
            }
        }
        let entities: Vec<String> = cells
            .keys()
            .map(|(e, _)| e.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let quarters: Vec<Quarter> = quarters.into_iter().collect();
        let mut values = vec![None; entities.len() * quarters.len() * k];
        for ((e, q), vals) in cells {
            let ei = entities.binary_search(&e).expect("entity");
            let qi = quarters.binary_search(&q).expect("quarter");
            let base = (ei * quarters.len() + qi) * k;
            values[base..base + k].copy_from_slice(&vals);
        }
        Ok(IndicatorPanel { entities, quarters, indicator_names, values })
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn quarters(&self) -> &[Quarter] {
        &self.quarters
    }

    pub fn indicator_names(&self) -> &[String] {
        &self.indicator_names
    }

    pub fn indicator_count(&self) -> usize {
        self.indicator_names.len()
    }

    pub fn entity_pos(&self, entity: &str) -> Option<usize> {
        self.entities.binary_search_by(|e| e.as_str().cmp(entity)).ok()
    }

    pub fn quarter_pos(&self, q: Quarter) -> Option<usize> {
        self.quarters.binary_search(&q).ok()
    }

    /// Indicator values at entity position `e`, quarter position `q`.
    pub fn row(&self, e: usize, q: usize) -> &[Option<f64>] {
        let k = self.indicator_count();
        let base = (e * self.quarters.len() + q) * k;
        &self.values[base..base + k]
    }

    /// The row with every value present, if it is complete.
    pub fn complete_row(&self, e: usize, q: usize) -> Option<Vec<f64>> {
        self.row(e, q).iter().copied().collect()
    }

    pub fn has_data(&self, e: usize, q: usize) -> bool {
        self.row(e, q).iter().any(Option::is_some)
    }

    /// Iterates `(entity, quarter, values)` in (entity, quarter) order, skipping
    /// all-missing cells.
    pub fn iter_rows(&self) -> impl Iterator<Item = (&str, Quarter, &[Option<f64>])> + '_ {
        (0..self.entities.len()).flat_map(move |e| {
            (0..self.quarters.len()).filter(move |&q| self.has_data(e, q)).map(move |q| {
                (self.entities[e].as_str(), self.quarters[q], self.row(e, q))
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_sorted_and_gaps_missing() {
        let q0: Quarter = "2000-Q1".parse().unwrap();
        let panel = IndicatorPanel::from_rows(
            vec!["a".into(), "b".into()],
            vec![
                ("Z".into(), q0, vec![Some(1.0), None]),
                ("A".into(), q0.offset(1), vec![Some(2.0), Some(3.0)]),
            ],
        )
        .unwrap();
        assert_eq!(panel.entities(), &["A".to_string(), "Z".to_string()]);
        assert_eq!(panel.quarters().len(), 2);
        assert!(!panel.has_data(0, 0));
        assert_eq!(panel.complete_row(0, 1), Some(vec![2.0, 3.0]));
        assert_eq!(panel.complete_row(1, 0), None);
        assert_eq!(panel.iter_rows().count(), 2);
    }

    #[test]
    fn rejects_duplicates_and_ragged_rows() {
        let q: Quarter = "2000-Q1".parse().unwrap();
        assert!(IndicatorPanel::from_rows(
            vec!["a".into()],
            vec![("A".into(), q, vec![Some(1.0)]), ("A".into(), q, vec![Some(1.0)])]
        )
        .is_err());
        assert!(IndicatorPanel::from_rows(vec!["a".into()], vec![("A".into(), q, vec![])]).is_err());
    }
}
