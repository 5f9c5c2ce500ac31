//! Retrains the bundled title model and prints it as JSON.
//!
//!     cargo run -p etd-quality --example train_title_model > crates/core/data/title_model.json

use etd_quality::detection::title::{classify_title, extract_title_features, train_bundled_title_model, TitleLabel};

fn main() -> etd_quality::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(17);
    let trained = train_bundled_title_model(seed)?;
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (title, gold) in &trained.holdout {
        let (pred, _) = classify_title(&extract_title_features(title, &trained.idf), &trained.model)?;
        match (pred == TitleLabel::Invalid, *gold == TitleLabel::Invalid) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    let f1 = 2.0 * tp as f64 / (2 * tp + fp + fn_).max(1) as f64;
    eprintln!("held-out invalid-class F1 {f1:.4} (tp {tp}, fp {fp}, fn {fn_})");
    println!("{}", serde_json::to_string_pretty(&trained.model)?);
    Ok(())
}
