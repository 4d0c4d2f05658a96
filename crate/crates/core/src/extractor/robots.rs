//! Minimal robots exclusion rules: user-agent groups with Allow/Disallow
//! path prefixes, `*` wildcards and `$` anchors. Longest match wins; Allow
//! wins ties.

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Robots {
    groups: Vec<Group>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Group {
    agents: Vec<String>,
    rules: Vec<(bool, String)>,
}

impl Robots {
    /// Rules that allow everything (missing or unreadable robots.txt).
    pub fn allow_all() -> Robots {
        Robots::default()
    }

    pub fn parse(text: &str) -> Robots {
        let mut groups: Vec<Group> = Vec::new();
        let mut current = Group::default();
        let mut in_rules = false;
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            let Some((key, value)) = line.split_once(':') else { continue };
            let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
            match key.as_str() {
                "user-agent" => {
                    if in_rules {
                        groups.push(std::mem::take(&mut current));
                        in_rules = false;
                    }
                    current.agents.push(value.to_ascii_lowercase());
                }
                "allow" | "disallow" => {
                    in_rules = true;
                    // An empty Disallow means "allow everything".
                    if !value.is_empty() {
                        current.rules.push((key == "allow", value.to_string()));
                    }
                }
                _ => {}
            }
        }
        if !current.agents.is_empty() {
            groups.push(current);
        }
        Robots { groups }
    }

    pub fn is_allowed(&self, user_agent: &str, path: &str) -> bool {
        let ua = user_agent.to_ascii_lowercase();
        let group = self
            .groups
            .iter()
            .find(|g| g.agents.iter().any(|a| a != "*" && ua.contains(a.as_str())))
            .or_else(|| self.groups.iter().find(|g| g.agents.iter().any(|a| a == "*")));
        let Some(group) = group else { return true };
        let mut best: Option<(usize, bool)> = None;
        for (allow, pattern) in &group.rules {
            if matches_pattern(pattern, path) {
                let len = pattern.len();
                best = match best {
                    Some((l, a)) if l > len || (l == len && a) => Some((l, a)),
                    _ => Some((len, *allow)),
                };
            }
        }
        best.map_or(true, |(_, allow)| allow)
    }
}

fn matches_pattern(pattern: &str, path: &str) -> bool {
    let (pattern, anchored) = match pattern.strip_suffix('$') {
        Some(p) => (p, true),
        None => (pattern, false),
    };
    wildcard(pattern.as_bytes(), path.as_bytes(), anchored)
}

fn wildcard(p: &[u8], s: &[u8], anchored: bool) -> bool {
    match p.split_first() {
        None => !anchored || s.is_empty(),
        Some((b'*', rest)) => (0..=s.len()).any(|i| wildcard(rest, &s[i..], anchored)),
        Some((c, rest)) => s.first() == Some(c) && wildcard(rest, &s[1..], anchored),
    }
}
