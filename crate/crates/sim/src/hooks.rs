//! Reward hooks selectable by name from a scenario file.

use std::sync::Arc;

use gridsim_core::{ItemId, RewardHook, RewardScheme, StepEvent};

pub const NAMES: [&str; 2] = ["zero_sum_food", "collision_winner"];

pub fn by_name(name: &str) -> Option<Arc<dyn RewardHook>> {
    match name {
        "zero_sum_food" => Some(Arc::new(ZeroSumFood)),
        "collision_winner" => Some(Arc::new(CollisionWinner)),
        _ => None,
    }
}

/// Every agent other than the eater loses the food reward.
#[derive(Debug)]
pub struct ZeroSumFood;

impl RewardHook for ZeroSumFood {
    fn reward(&self, scheme: &RewardScheme, event: &StepEvent, recipient: ItemId) -> f64 {
        match *event {
            StepEvent::FoodConsumed { agent, .. } if agent != recipient => -scheme.food,
            _ => scheme.default_reward(event, recipient),
        }
    }
}

/// The strictly stronger side of a collision gains what the weaker side loses.
#[derive(Debug)]
pub struct CollisionWinner;

impl RewardHook for CollisionWinner {
    fn reward(&self, scheme: &RewardScheme, event: &StepEvent, recipient: ItemId) -> f64 {
        if let StepEvent::Collision { mover, occupant, mover_power, occupant_power } = *event {
            let winner = match mover_power.cmp(&occupant_power) {
                std::cmp::Ordering::Greater => Some(mover),
                std::cmp::Ordering::Less => Some(occupant),
                std::cmp::Ordering::Equal => None,
            };
            if winner == Some(recipient) {
                return -scheme.collision;
            }
        }
        scheme.default_reward(event, recipient)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn winner_gains_loser_pays() {
        let s = RewardScheme::default();
        let e = StepEvent::Collision { mover: ItemId(1), occupant: ItemId(2), mover_power: 1, occupant_power: 3 };
        assert_eq!(CollisionWinner.reward(&s, &e, ItemId(2)), 10.0);
        assert_eq!(CollisionWinner.reward(&s, &e, ItemId(1)), -10.0);
        assert_eq!(CollisionWinner.reward(&s, &e, ItemId(9)), 0.0);
    }

    #[test]
    fn names_resolve() {
        for n in NAMES {
            assert!(by_name(n).is_some());
        }
        assert!(by_name("nope").is_none());
    }
}
