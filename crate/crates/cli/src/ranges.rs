//! Integer lists like `3`, `2..6`, `2..=6` or `2,4,10..12`. Both range forms
//! are inclusive.

pub fn parse_list(spec: &str) -> Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim) {
        if part.is_empty() {
            return Err(format!("empty item in list '{spec}'"));
        }
        if let Some((a, b)) = part.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let lo = parse_one(a)?;
            let hi = parse_one(b)?;
            if lo > hi {
                return Err(format!("empty range '{part}'"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(parse_one(part)?);
        }
    }
    Ok(out)
}

fn parse_one(s: &str) -> Result<u32, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a non-negative integer"))
}
