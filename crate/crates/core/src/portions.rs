//! Remaining-bite estimates per food label.

use crate::geometry::major_axis;
use crate::planner::PlannerConfig;
use crate::plate::{FoodCategory, FoodItem, PlateState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortionBasis {
    InstanceCount,
    AxisOverBite,
    AreaOverPortion,
}

impl PortionBasis {
    pub fn for_category(category: FoodCategory) -> Option<Self> {
        match category {
            FoodCategory::MeatSeafood | FoodCategory::Fruit | FoodCategory::Vegetable => {
                Some(PortionBasis::InstanceCount)
            }
            FoodCategory::Cuttable => Some(PortionBasis::AxisOverBite),
            FoodCategory::Noodles | FoodCategory::Semisolid => Some(PortionBasis::AreaOverPortion),
            FoodCategory::Sauce => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PortionBasis::InstanceCount => "instance_count",
            PortionBasis::AxisOverBite => "axis_over_bite",
            PortionBasis::AreaOverPortion => "area_over_portion",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortionEstimate {
    pub label: String,
    pub portions: u32,
    pub basis: PortionBasis,
}

fn ceil_ratio(value: f64, unit: f64) -> u32 {
    (value / unit).ceil().max(0.0) as u32
}

/// Bites held by one item: one per countable piece, `ceil(axis / bite_length)`
/// for cuttables, `ceil(area / portion_size)` for piles. Any non-empty item is
/// worth at least one bite.
pub fn item_portions(item: &FoodItem, cfg: &PlannerConfig) -> Option<u32> {
    let area = item.mask.area();
    if area == 0 {
        return Some(0);
    }
    let n = match PortionBasis::for_category(item.category)? {
        PortionBasis::InstanceCount => 1,
        PortionBasis::AxisOverBite => {
            let axis = major_axis(&item.mask).map(|a| a.axis_length).unwrap_or(0.0);
            ceil_ratio(axis, cfg.bite_length)
        }
        PortionBasis::AreaOverPortion => ceil_ratio(area as f64, cfg.portion_size),
    };
    Some(n.max(1))
}

/// One estimate per non-sauce label, in order of first appearance.
pub fn estimate_portions(state: &PlateState, cfg: &PlannerConfig) -> Vec<PortionEstimate> {
    let mut out: Vec<PortionEstimate> = Vec::new();
    for item in state.items() {
        let Some(basis) = PortionBasis::for_category(item.category) else {
            continue;
        };
        let n = item_portions(item, cfg).unwrap_or(0);
        if n == 0 {
            continue;
        }
        match out.iter_mut().find(|e| e.label == item.label) {
            Some(e) => e.portions += n,
            None => out.push(PortionEstimate {
                label: item.label.clone(),
                portions: n,
                basis,
            }),
        }
    }
    out
}
