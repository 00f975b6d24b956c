use roxmltree::{Document, Node};

use super::{
    DataAttribute, DataType, Property, Task, TaskCategory, TaskModel, TaskModelError, TaskType,
    TemporalOperator,
};

const TASK_ATTRS: &[&str] = &[
    "name",
    "description",
    "optional",
    "category",
    "type",
    "dataType",
    "property",
];

/// Parses a task-model document.
///
/// The document element is either `<taskModel name="...">` wrapping one root `<task>`, or the
/// root `<task>` itself (the model is then named after it).
pub fn parse_task_model(document: &str) -> Result<TaskModel, TaskModelError> {
    let doc = Document::parse(document).map_err(|e| TaskModelError::Xml(e.to_string()))?;
    let top = doc.root_element();
    let (name, root_task) = match top.tag_name().name() {
        "taskModel" => {
            let tasks: Vec<Node> = element_children(top).collect();
            let [task] = tasks.as_slice() else {
                return Err(schema(&doc, top, "expected exactly one root <task>"));
            };
            if task.tag_name().name() != "task" {
                return Err(schema(&doc, *task, "expected <task>"));
            }
            let task = parse_task(&doc, *task)?;
            let name = top
                .attribute("name")
                .map(str::to_string)
                .unwrap_or_else(|| task.name.clone());
            (name, task)
        }
        "task" => {
            let task = parse_task(&doc, top)?;
            (task.name.clone(), task)
        }
        other => {
            return Err(schema(
                &doc,
                top,
                &format!("unexpected document element <{other}>"),
            ))
        }
    };
    TaskModel::new(name, root_task)
}

fn element_children<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children().filter(|c| c.is_element())
}

fn schema(doc: &Document, node: Node, message: &str) -> TaskModelError {
    TaskModelError::Schema {
        element: node.tag_name().name().to_string(),
        line: doc.text_pos_at(node.range().start).row,
        message: message.to_string(),
    }
}

fn parse_task(doc: &Document, node: Node) -> Result<Task, TaskModelError> {
    for attr in node.attributes() {
        if !TASK_ATTRS.contains(&attr.name()) {
            return Err(schema(
                doc,
                node,
                &format!("unknown attribute `{}`", attr.name()),
            ));
        }
    }
    let name = node
        .attribute("name")
        .ok_or_else(|| schema(doc, node, "missing `name`"))?
        .to_string();

    let mut children = Vec::new();
    let mut operators = Vec::new();
    let mut expect_task = true;
    for child in element_children(node) {
        match (child.tag_name().name(), expect_task) {
            ("task", true) => children.push(parse_task(doc, child)?),
            ("op", false) => {
                for attr in child.attributes() {
                    if attr.name() != "kind" {
                        return Err(schema(
                            doc,
                            child,
                            &format!("unknown attribute `{}`", attr.name()),
                        ));
                    }
                }
                let kind = child
                    .attribute("kind")
                    .ok_or_else(|| schema(doc, child, "missing `kind`"))?;
                operators.push(kind.parse::<TemporalOperator>()?);
            }
            ("task", false) => {
                return Err(schema(
                    doc,
                    child,
                    "sibling tasks must be separated by <op>",
                ))
            }
            ("op", true) => return Err(schema(doc, child, "<op> must sit between two tasks")),
            (other, _) => return Err(schema(doc, child, &format!("unexpected element <{other}>"))),
        }
        expect_task = !expect_task;
    }
    if !children.is_empty() && expect_task {
        return Err(schema(doc, node, "trailing <op> without a following task"));
    }

    let optional = match node.attribute("optional") {
        None | Some("false") => false,
        Some("true") => true,
        Some(other) => {
            return Err(schema(
                doc,
                node,
                &format!("invalid `optional` value `{other}`"),
            ))
        }
    };
    let is_leaf = children.is_empty();
    let category = match node.attribute("category") {
        Some(c) => c
            .parse::<TaskCategory>()
            .map_err(|m| schema(doc, node, &m))?,
        None if is_leaf => TaskCategory::Interactive,
        None => TaskCategory::Abstract,
    };
    let task_type = node
        .attribute("type")
        .map(|t| t.parse::<TaskType>().map_err(|m| schema(doc, node, &m)))
        .transpose()?;
    let data = match node.attribute("dataType") {
        Some(dt) => {
            let data_type: DataType = dt.parse()?;
            let property = node
                .attribute("property")
                .map(|p| p.parse::<Property>().map_err(|m| schema(doc, node, &m)))
                .transpose()?;
            if property.is_some() && !data_type.takes_property() {
                return Err(schema(
                    doc,
                    node,
                    &format!("data type {dt} takes no property"),
                ));
            }
            Some(DataAttribute {
                data_type,
                property,
            })
        }
        None if node.attribute("property").is_some() => {
            return Err(schema(doc, node, "`property` requires `dataType`"))
        }
        None => None,
    };

    Ok(Task {
        name,
        description: node
            .attribute("description")
            .unwrap_or_default()
            .to_string(),
        optional,
        category,
        task_type,
        data,
        children,
        operators,
    })
}

/// Writes `model` in the same schema [`parse_task_model`] reads.
pub fn serialize_task_model(model: &TaskModel) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!("<taskModel name=\"{}\">\n", escape(model.name())));
    write_task(&mut out, model.root(), 1);
    out.push_str("</taskModel>\n");
    out
}

fn write_task(out: &mut String, task: &Task, depth: usize) {
    let indent = "  ".repeat(depth);
    out.push_str(&format!("{indent}<task name=\"{}\"", escape(&task.name)));
    if !task.description.is_empty() {
        out.push_str(&format!(" description=\"{}\"", escape(&task.description)));
    }
    if task.optional {
        out.push_str(" optional=\"true\"");
    }
    out.push_str(&format!(" category=\"{}\"", task.category.token()));
    if let Some(t) = task.task_type {
        out.push_str(&format!(" type=\"{}\"", t.token()));
    }
    if let Some(d) = &task.data {
        out.push_str(&format!(" dataType=\"{}\"", d.data_type.token()));
        if let Some(p) = d.property {
            out.push_str(&format!(" property=\"{p}\""));
        }
    }
    if task.children.is_empty() {
        out.push_str("/>\n");
        return;
    }
    out.push_str(">\n");
    for (i, child) in task.children.iter().enumerate() {
        write_task(out, child, depth + 1);
        if let Some(op) = task.operators.get(i) {
            out.push_str(&format!(
                "{indent}  <op kind=\"{}\"/>\n",
                escape(op.token())
            ));
        }
    }
    out.push_str(&format!("{indent}</task>\n"));
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}
