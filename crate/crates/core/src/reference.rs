//! Published per-community tallies, kept for arithmetic audits of the report layouts.

/// Unique tweets, offensive tweets and the printed offensive proportion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffenseTally {
    pub community: &'static str,
    pub unique_tweets: usize,
    pub offensive_tweets: usize,
    pub printed_proportion: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BotTally {
    pub community: &'static str,
    pub accounts: usize,
    pub bots: usize,
    pub printed_bot_proportion: f64,
    pub tweets: usize,
    pub automated_tweets: usize,
    pub printed_automated_proportion: f64,
}

pub const OFFENSE_TALLIES: [OffenseTally; 7] = [
    OffenseTally { community: "Mélenchon", unique_tweets: 756_318, offensive_tweets: 208_178, printed_proportion: 0.275 },
    OffenseTally { community: "Anti-Macron", unique_tweets: 549_138, offensive_tweets: 168_685, printed_proportion: 0.307 },
    OffenseTally { community: "Zemmour", unique_tweets: 1_034_538, offensive_tweets: 316_214, printed_proportion: 0.305 },
    OffenseTally { community: "Macron", unique_tweets: 468_138, offensive_tweets: 126_122, printed_proportion: 0.269 },
    OffenseTally { community: "Pécresse", unique_tweets: 80_365, offensive_tweets: 19_487, printed_proportion: 0.242 },
    OffenseTally { community: "Le Pen", unique_tweets: 86_272, offensive_tweets: 25_368, printed_proportion: 0.294 },
    OffenseTally { community: "Jadot", unique_tweets: 12_340, offensive_tweets: 1_632, printed_proportion: 0.132 },
];

pub const BOT_TALLIES: [BotTally; 7] = [
    BotTally { community: "Mélenchon", accounts: 15_001, bots: 2_507, printed_bot_proportion: 0.167, tweets: 5_755_664, automated_tweets: 1_273_656, printed_automated_proportion: 0.284 },
    BotTally { community: "Anti-Macron", accounts: 12_428, bots: 2_181, printed_bot_proportion: 0.175, tweets: 5_435_820, automated_tweets: 1_268_240, printed_automated_proportion: 0.304 },
    BotTally { community: "Zemmour", accounts: 12_101, bots: 2_217, printed_bot_proportion: 0.183, tweets: 6_160_153, automated_tweets: 1_501_207, printed_automated_proportion: 0.322 },
    BotTally { community: "Macron", accounts: 5_816, bots: 1_001, printed_bot_proportion: 0.172, tweets: 2_219_491, automated_tweets: 514_820, printed_automated_proportion: 0.302 },
    BotTally { community: "Pécresse", accounts: 1_035, bots: 208, printed_bot_proportion: 0.200, tweets: 408_319, automated_tweets: 134_373, printed_automated_proportion: 0.490 },
    BotTally { community: "Le Pen", accounts: 1_001, bots: 184, printed_bot_proportion: 0.184, tweets: 463_290, automated_tweets: 127_633, printed_automated_proportion: 0.380 },
    BotTally { community: "Jadot", accounts: 196, bots: 30, printed_bot_proportion: 0.153, tweets: 66_541, automated_tweets: 19_876, printed_automated_proportion: 0.426 },
];

/// Flag level for a recomputed proportion that disagrees with the printed one.
pub const BOT_DEVIATION_LIMIT: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BotTallyAudit {
    pub community: &'static str,
    pub bot_proportion: f64,
    pub bot_deviation: f64,
    pub automated_proportion: f64,
    pub automated_deviation: f64,
    /// `automated_deviation > BOT_DEVIATION_LIMIT`
    pub automated_flagged: bool,
}

/// Recomputes both proportions of a row from its counts (unrounded ratios).
pub fn audit_bot_tally(t: &BotTally) -> BotTallyAudit {
    let bot_proportion = t.bots as f64 / t.accounts as f64;
    let automated_proportion = t.automated_tweets as f64 / t.tweets as f64;
    let automated_deviation = (automated_proportion - t.printed_automated_proportion).abs();
    BotTallyAudit {
        community: t.community,
        bot_proportion,
        bot_deviation: (bot_proportion - t.printed_bot_proportion).abs(),
        automated_proportion,
        automated_deviation,
        automated_flagged: automated_deviation > BOT_DEVIATION_LIMIT,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn automated_column_flags() {
        let zemmour = audit_bot_tally(&BOT_TALLIES[2]);
        assert!((zemmour.automated_proportion - 0.2437).abs() < 1e-4);
        assert!(zemmour.automated_flagged);
    }
}
