use serde::Serialize;

use super::panel::IndicatorPanel;
use crate::error::{Error, Result};
use crate::quarter::Quarter;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrisisEvent {
    pub entity: String,
    pub start: Quarter,
    /// Last crisis quarter; an open episode covers only `start`.
    pub end: Option<Quarter>,
}

impl CrisisEvent {
    pub fn contains(&self, q: Quarter) -> bool {
        q >= self.start && q <= self.end.unwrap_or(self.start)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrisisEvents(Vec<CrisisEvent>);

impl CrisisEvents {
    pub fn new(mut events: Vec<CrisisEvent>) -> Result<Self> {
        for e in &events {
            if let Some(end) = e.end {
                if end < e.start {
                    return Err(Error::InvalidParameter(format!(
                        "crisis of {} ends ({end}) before it starts ({})",
                        e.entity, e.start
                    )));
                }
            }
        }
        events.sort_by(|a, b| (&a.entity, a.start).cmp(&(&b.entity, b.start)));
        Ok(CrisisEvents(events))
    }

    pub fn events(&self) -> &[CrisisEvent] {
        &self.0
    }

    pub fn for_entity<'a>(&'a self, entity: &'a str) -> impl Iterator<Item = &'a CrisisEvent> + 'a {
        self.0.iter().filter(move |e| e.entity == entity)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    Tranquil,
    PreCrisis,
    /// Inside a crisis episode: neither trained on nor evaluated.
    Excluded,
    /// No indicator data for the cell.
    Unavailable,
}

impl Label {
    /// The binary leading-indicator value when the label is usable.
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Label::Tranquil => Some(false),
            Label::PreCrisis => Some(true),
            Label::Excluded | Label::Unavailable => None,
        }
    }
}

/// Pre-crisis labels aligned with an indicator panel.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSeries {
    entities: Vec<String>,
    quarters: Vec<Quarter>,
    labels: Vec<Label>,
}

impl LabelSeries {
    pub fn get(&self, e: usize, q: usize) -> Label {
        self.labels[e * self.quarters.len() + q]
    }

    pub fn label_of(&self, entity: &str, quarter: Quarter) -> Option<Label> {
        let e = self.entities.binary_search_by(|x| x.as_str().cmp(entity)).ok()?;
        let q = self.quarters.binary_search(&quarter).ok()?;
        Some(self.get(e, q))
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn quarters(&self) -> &[Quarter] {
        &self.quarters
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

/// Labels quarter `q` of an entity pre-crisis iff one of its crises starts in
/// `[q + h1, q + h2]`. Quarters inside a crisis episode are excluded, and
/// cells without data are unavailable.
pub fn label_precrisis(events: &CrisisEvents, panel: &IndicatorPanel, h1: i32, h2: i32) -> Result<LabelSeries> {
    if h1 < 1 || h1 > h2 {
        return Err(Error::InvalidParameter(format!("horizon [{h1}, {h2}] must satisfy 1 <= h1 <= h2")));
    }
    let quarters = panel.quarters().to_vec();
    let mut labels = Vec::with_capacity(panel.entities().len() * quarters.len());
    for (e, entity) in panel.entities().iter().enumerate() {
        let own: Vec<&CrisisEvent> = events.for_entity(entity).collect();
        for (qi, &q) in quarters.iter().enumerate() {
            let label = if !panel.has_data(e, qi) {
                Label::Unavailable
            } else if own.iter().any(|c| c.contains(q)) {
                Label::Excluded
            } else if own.iter().any(|c| {
                let ahead = c.start.since(q);
                (h1..=h2).contains(&ahead)
            }) {
                Label::PreCrisis
            } else {
                Label::Tranquil
            };
            labels.push(label);
        }
    }
    Ok(LabelSeries { entities: panel.entities().to_vec(), quarters, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(from: &str, n: i32) -> IndicatorPanel {
        let q0: Quarter = from.parse().unwrap();
        IndicatorPanel::from_rows(
            vec!["x".into()],
            (0..n).map(|i| ("DE".to_string(), q0.offset(i), vec![Some(0.0)])),
        )
        .unwrap()
    }

    fn q(s: &str) -> Quarter {
        s.parse().unwrap()
    }

    #[test]
    fn precrisis_window_5_to_12() {
        let p = panel("2000-Q1", 48);
        let ev = CrisisEvents::new(vec![CrisisEvent {
            entity: "DE".into(),
            start: q("2008-Q1"),
            end: Some(q("2009-Q2")),
        }])
        .unwrap();
        let labels = label_precrisis(&ev, &p, 5, 12).unwrap();
        let pre: Vec<String> = p
            .quarters()
            .iter()
            .filter(|&&qq| labels.label_of("DE", qq) == Some(Label::PreCrisis))
            .map(|qq| qq.to_string())
            .collect();
        assert_eq!(pre.len(), 8);
        assert_eq!(pre.first().unwrap(), "2005-Q1");
        assert_eq!(pre.last().unwrap(), "2006-Q4");
        for s in ["2008-Q1", "2008-Q4", "2009-Q2"] {
            assert_eq!(labels.label_of("DE", q(s)), Some(Label::Excluded), "{s}");
        }
        assert_eq!(labels.label_of("DE", q("2009-Q3")), Some(Label::Tranquil));
        assert_eq!(labels.count(Label::Excluded), 6);
    }

    #[test]
    fn no_events_all_tranquil() {
        let p = panel("2000-Q1", 20);
        let labels = label_precrisis(&CrisisEvents::default(), &p, 5, 12).unwrap();
        assert_eq!(labels.count(Label::Tranquil), 20);
    }

    #[test]
    fn open_episode_excludes_start_only() {
        let p = panel("2000-Q1", 20);
        let ev = CrisisEvents::new(vec![CrisisEvent { entity: "DE".into(), start: q("2003-Q1"), end: None }]).unwrap();
        let labels = label_precrisis(&ev, &p, 1, 2).unwrap();
        assert_eq!(labels.label_of("DE", q("2003-Q1")), Some(Label::Excluded));
        assert_eq!(labels.label_of("DE", q("2003-Q2")), Some(Label::Tranquil));
        assert_eq!(labels.label_of("DE", q("2002-Q3")), Some(Label::PreCrisis));
    }

    #[test]
    fn invalid_inputs() {
        let p = panel("2000-Q1", 4);
        assert!(label_precrisis(&CrisisEvents::default(), &p, 0, 3).is_err());
        assert!(label_precrisis(&CrisisEvents::default(), &p, 5, 3).is_err());
        assert!(CrisisEvents::new(vec![CrisisEvent {
            entity: "DE".into(),
            start: q("2003-Q2"),
            end: Some(q("2003-Q1")),
        }])
        .is_err());
    }
}
