//! Prompt assembly for the answer generator.

use crate::payload::RoutePayload;
use walkrag_core::Passage;

pub const TEMPLATE_VERSION: u32 = 1;
pub const TEMPLATE: &str = include_str!("../templates/prompt_v1.txt");

pub const ROUTE_CONTEXT: &str = "route";
pub const PASSAGE_CONTEXT: &str = "passages";
pub const NO_CONTEXT: &str = "none";

pub const NO_CONTEXT_NOTICE: &str = "NO RETRIEVED CONTEXT: the knowledge base returned no passages for this question.";

const ROUTE_OUTPUT: &str = "Describe the route to the user. List every instruction of the payload in order, \
without merging or skipping steps. Then give the walkability score and the points of interest of each segment.";
const PASSAGE_OUTPUT: &str = "Answer the question using only the numbered passages and cite them as [n].";
const NO_CONTEXT_OUTPUT: &str = "Tell the user that you could not find information on this topic. Do not guess.";

fn render(kind: &str, context: &str, utterance: &str, output: &str) -> String {
    TEMPLATE
        .replace("{{context_kind}}", kind)
        .replace("{{context}}", context)
        .replace("{{utterance}}", utterance.trim())
        .replace("{{output_instructions}}", output)
}

/// Route prompt: the payload goes verbatim in a fenced JSON block.
pub fn route_prompt(utterance: &str, payload: &RoutePayload) -> String {
    let context = format!("```json\n{}\n```", payload.to_json_pretty());
    render(ROUTE_CONTEXT, &context, utterance, ROUTE_OUTPUT)
}

/// Information prompt over ranked passages; an empty list yields the
/// explicit no-context notice.
pub fn information_prompt(utterance: &str, passages: &[&Passage]) -> String {
    if passages.is_empty() {
        return render(NO_CONTEXT, NO_CONTEXT_NOTICE, utterance, NO_CONTEXT_OUTPUT);
    }
    let mut context = String::from("```passages\n");
    for (i, p) in passages.iter().enumerate() {
        if i > 0 {
            context.push('\n');
        }
        context.push_str(&format!("[{}] id={}\n{}\n", i + 1, p.id, p.text.trim()));
    }
    context.push_str("```");
    render(PASSAGE_CONTEXT, &context, utterance, PASSAGE_OUTPUT)
}

/// Parsed view of a rendered prompt, used by the mock generator.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptParts<'a> {
    pub context_kind: &'a str,
    pub context: &'a str,
    pub utterance: &'a str,
}

pub fn parse_prompt(prompt: &str) -> Option<PromptParts<'_>> {
    let (_, rest) = prompt.split_once("### CONTEXT (")?;
    let (kind, rest) = rest.split_once(")\n")?;
    let (context, rest) = rest.split_once("\n\n### USER\n")?;
    let (utterance, _) = rest.split_once("\n\n### OUTPUT\n")?;
    Some(PromptParts { context_kind: kind, context, utterance })
}

/// Contents of the first fenced block tagged `lang`.
pub fn fenced_block<'a>(text: &'a str, lang: &str) -> Option<&'a str> {
    let open = format!("```{lang}\n");
    let start = text.find(&open)? + open.len();
    let end = text[start..].find("\n```")?;
    Some(&text[start..start + end])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn passage(id: &str, text: &str) -> Passage {
        Passage { id: id.into(), text: text.into(), source: None }
    }

    #[test]
    fn information_prompt_numbers_passages() {
        let a = passage("p1", "The Louvre is a museum.");
        let b = passage("p2", "Pont Neuf is a bridge.");
        let prompt = information_prompt("Tell me about the Louvre ", &[&a, &b]);
        let parts = parse_prompt(&prompt).unwrap();
        assert_eq!(parts.context_kind, PASSAGE_CONTEXT);
        assert_eq!(parts.utterance, "Tell me about the Louvre");
        let block = fenced_block(parts.context, "passages").unwrap();
        assert!(block.starts_with("[1] id=p1\nThe Louvre is a museum.\n\n[2] id=p2"), "{block}");
    }

    #[test]
    fn empty_retrieval_is_explicit() {
        let prompt = information_prompt("Who won in 1998?", &[]);
        let parts = parse_prompt(&prompt).unwrap();
        assert_eq!(parts.context_kind, NO_CONTEXT);
        assert_eq!(parts.context, NO_CONTEXT_NOTICE);
        assert!(!prompt.contains("```"));
    }

    #[test]
    fn template_has_all_slots() {
        for slot in ["{{context_kind}}", "{{context}}", "{{utterance}}", "{{output_instructions}}"] {
            assert!(TEMPLATE.contains(slot), "{slot}");
        }
    }
}
