use crate::error::{Error, Result};

/// Renders rows as CSV text with a header line.
pub fn write_csv<I>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let io = |e: csv::Error| Error::Serialization(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf8"))
}

fn as_rational(s: &str) -> Option<f64> {
    if !s.contains('/') {
        return None;
    }
    s.parse::<crate::Rational>().ok().map(|r| r.to_f64())
}

/// Adds a `<key>_approx` decimal beside every rational-valued field.
pub fn approximate_json(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            let extra: Vec<(String, f64)> = map
                .iter()
                .filter_map(|(k, v)| Some((format!("{k}_approx"), as_rational(v.as_str()?)?)))
                .collect();
            for child in map.values_mut() {
                approximate_json(child);
            }
            for (k, x) in extra {
                map.insert(k, serde_json::json!(x));
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(approximate_json),
        _ => {}
    }
}

/// Appends a `<column>_approx` decimal column for every column whose
/// nonempty cells are all rationals.
pub fn approximate_csv(text: &str) -> Result<String> {
    let io = |e: csv::Error| Error::Serialization(e.to_string());
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(io)?.iter().map(String::from).collect();
    let rows: Vec<Vec<String>> = r
        .records()
        .map(|rec| rec.map(|x| x.iter().map(String::from).collect()))
        .collect::<std::result::Result<_, _>>()
        .map_err(io)?;
    let rational_cols: Vec<usize> = (0..header.len())
        .filter(|&c| {
            let mut cells = rows.iter().map(|row| row[c].as_str()).filter(|s| !s.is_empty()).peekable();
            cells.peek().is_some() && cells.all(|s| as_rational(s).is_some())
        })
        .collect();
    let mut head: Vec<String> = header.clone();
    head.extend(rational_cols.iter().map(|&c| format!("{}_approx", header[c])));
    let head_refs: Vec<&str> = head.iter().map(String::as_str).collect();
    write_csv(
        &head_refs,
        rows.into_iter().map(|mut row| {
            let extra: Vec<String> = rational_cols
                .iter()
                .map(|&c| as_rational(&row[c]).map(|x| format!("{x:.12}")).unwrap_or_default())
                .collect();
            row.extend(extra);
            row
        }),
    )
}
