//! The doubling code `x ↦ β(x)11β(x)11` with `β(0) = 01`, `β(1) = 10`.

pub fn is_binary(x: &str) -> bool {
    x.bytes().all(|c| c == b'0' || c == b'1')
}

/// Letter-wise code `0 ↦ 01`, `1 ↦ 10`.
///
/// # Panics
/// If `x` contains a character other than `0` or `1`.
pub fn beta(x: &str) -> String {
    x.chars()
        .map(|c| match c {
            '0' => "01",
            '1' => "10",
            _ => panic!("beta: `{x}` is not a binary word"),
        })
        .collect()
}

/// `β(x)11β(x)11`.
pub fn sq(x: &str) -> String {
    let half = format!("{}11", beta(x));
    format!("{half}{half}")
}

/// Inverse of [`sq`] on its image.
pub fn sq_decode(w: &str) -> Option<String> {
    if !w.len().is_multiple_of(2) || !is_binary(w) {
        return None;
    }
    let (h1, h2) = w.split_at(w.len() / 2);
    if h1 != h2 {
        return None;
    }
    let code = h1.strip_suffix("11")?;
    if !code.len().is_multiple_of(2) {
        return None;
    }
    code.as_bytes()
        .chunks(2)
        .map(|p| match p {
            b"01" => Some('0'),
            b"10" => Some('1'),
            _ => None,
        })
        .collect()
}
