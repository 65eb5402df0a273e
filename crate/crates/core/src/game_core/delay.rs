use super::{GameAction, GameError, Move, MoveStep, PlayerId};

/// Delay operator: within each `tau`-delimited segment, moves every adversary
/// action to the right of the planner's actions (including `theta`), keeping the
/// relative order of each player's actions.
///
/// Accepts both the alternating form produced by the hidden-information game and
/// the already-delayed form, so the operator is idempotent.
pub fn delay_move(m: &Move) -> Result<Move, GameError> {
    let mut out = Vec::with_capacity(m.len());
    let mut p2: Vec<MoveStep> = Vec::new();
    let mut p1: Vec<MoveStep> = Vec::new();
    let mut moves = 0usize;
    let mut theta = false;
    let err = |position, reason| Err(GameError::MalformedMove { position, reason });

    for (i, s) in m.steps().iter().enumerate() {
        match (s.player, s.action) {
            (PlayerId::P2, GameAction::Move(_)) => {
                if theta {
                    return err(i, "planner move after a reveal attempt in the same segment");
                }
                moves += 1;
                p2.push(*s);
            }
            (PlayerId::P2, GameAction::Theta) => {
                if theta {
                    return err(i, "second reveal attempt in one segment");
                }
                theta = true;
                p2.push(*s);
            }
            (PlayerId::P1, GameAction::Move(_)) => {
                if p1.len() >= moves {
                    return err(i, "adversary action without a pending planner move");
                }
                p1.push(*s);
            }
            (PlayerId::PStoch, GameAction::Tau) => {
                if !theta {
                    return err(i, "probabilistic step without a reveal attempt");
                }
                if p1.len() != moves {
                    return err(i, "reveal resolved before all delayed actions were played");
                }
                out.append(&mut p2);
                out.append(&mut p1);
                out.push(*s);
                moves = 0;
                theta = false;
            }
            _ => return err(i, "action not available to its player"),
        }
    }
    out.append(&mut p2);
    out.append(&mut p1);
    Ok(Move(out))
}

/// Probability that every stage's reveal succeeds within its attempts:
/// the product of `1 - (1 - p)^m` over `(p, m)` stages.
pub fn reveal_probability(stages: &[(f64, u32)]) -> Result<f64, GameError> {
    stages.iter().enumerate().try_fold(1.0, |acc, (i, &(p, m))| {
        if !(0.0..=1.0).contains(&p) {
            return Err(GameError::ProbabilityOutOfRange(p));
        }
        if m == 0 {
            return Err(GameError::ZeroAttempts(i));
        }
        Ok(acc * (1.0 - (1.0 - p).powi(m as i32)))
    })
}
