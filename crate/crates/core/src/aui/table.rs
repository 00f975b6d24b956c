use serde::{Deserialize, Serialize};

use crate::task_model::{DataAttribute, DataType, MethodKind, Property, Task, TaskType};

use super::AuiError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AicType {
    Selection,
    Input,
    Output,
    Trigger,
}

impl From<TaskType> for AicType {
    fn from(t: TaskType) -> Self {
        match t {
            TaskType::Input => AicType::Input,
            TaskType::Output => AicType::Output,
            TaskType::Selection => AicType::Selection,
            TaskType::Trigger => AicType::Trigger,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidgetKind {
    CheckButton,
    ProfiledEditField,
    AlphanumericEditField,
    Link,
    BrowseButton,
    SingleLineEditField,
    TwoLineEditField,
    MultiLineEditField,
    Slider,
    RadioGroup,
    ListBox,
    ComboBox,
    Accumulator,
    PushButton,
    SemanticEditField,
}

impl WidgetKind {
    /// Widgets whose value is text typed by the user.
    pub fn is_text(self) -> bool {
        matches!(
            self,
            WidgetKind::ProfiledEditField
                | WidgetKind::AlphanumericEditField
                | WidgetKind::SingleLineEditField
                | WidgetKind::TwoLineEditField
                | WidgetKind::MultiLineEditField
                | WidgetKind::SemanticEditField
        )
    }
}

/// Widget chosen for a component. `grid` is `(row, col)` within its panel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidgetSpec {
    pub kind: WidgetKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    pub grid: (usize, usize),
}

pub const HOUR_PATTERN: &str = r"^([01][0-9]|2[0-3]):[0-5][0-9]$";
pub const DATE_PATTERN: &str = r"^[0-9]{4}-(0[1-9]|1[0-2])-(0[1-9]|[12][0-9]|3[01])$";
pub const HASHTAG_PATTERN: &str = r"^#[A-Za-z0-9_]+$";

/// Selects the abstract interaction component for an attribute.
///
/// Bounds are inclusive: a 30-character string is single-line, a 3-value enumeration a radio
/// group. A missing string length reads as single-line and a missing integer width as a
/// profiled field; an enumeration without cardinality has no row.
pub fn map_attribute_to_aic(
    attr: &DataAttribute,
    task_type: TaskType,
) -> Result<(AicType, WidgetKind, Option<String>), AuiError> {
    let bound = match attr.property {
        Some(Property::Bound(n)) => Some(n),
        _ => None,
    };
    let no_row = || AuiError::NoMappingRow {
        data_type: attr.data_type.token().to_string(),
        property: attr.property.map(|p| p.to_string()),
    };
    let (kind, pattern) = match attr.data_type {
        DataType::Boolean => (WidgetKind::CheckButton, None),
        DataType::Hour => (WidgetKind::ProfiledEditField, Some(HOUR_PATTERN)),
        DataType::Date => (WidgetKind::ProfiledEditField, Some(DATE_PATTERN)),
        DataType::Char => (WidgetKind::AlphanumericEditField, None),
        DataType::Url => (WidgetKind::Link, None),
        DataType::Hashtag => (WidgetKind::ProfiledEditField, Some(HASHTAG_PATTERN)),
        DataType::Media => (WidgetKind::BrowseButton, None),
        DataType::String => match bound {
            None => (WidgetKind::SingleLineEditField, None),
            Some(n) if n <= 30 => (WidgetKind::SingleLineEditField, None),
            Some(n) if n <= 60 => (WidgetKind::TwoLineEditField, None),
            Some(_) => (WidgetKind::MultiLineEditField, None),
        },
        DataType::Integer => match bound {
            Some(n) if n <= 2 => (WidgetKind::Slider, None),
            _ => (WidgetKind::ProfiledEditField, None),
        },
        DataType::Real => (WidgetKind::ProfiledEditField, None),
        DataType::Enumeration => match bound.ok_or_else(no_row)? {
            0 => return Err(no_row()),
            n if n <= 3 => (WidgetKind::RadioGroup, None),
            n if n <= 7 => (WidgetKind::ListBox, None),
            n if n <= 30 => (WidgetKind::ComboBox, None),
            _ => (WidgetKind::Accumulator, None),
        },
        DataType::Method => match attr.property {
            Some(Property::Method(MethodKind::Direct)) => (WidgetKind::PushButton, None),
            Some(Property::Method(MethodKind::Indirect)) => (WidgetKind::SemanticEditField, None),
            _ => return Err(no_row()),
        },
    };
    Ok((task_type.into(), kind, pattern.map(str::to_string)))
}

/// Mapping for a leaf task. A leaf without a data attribute is a direct method when it is a
/// trigger and a plain string otherwise; a leaf without a type is an input, or a trigger for
/// methods.
pub fn map_task(task: &Task) -> Result<(AicType, WidgetKind, Option<String>), AuiError> {
    let task_type = task.task_type.unwrap_or(match task.data {
        Some(DataAttribute {
            data_type: DataType::Method,
            ..
        }) => TaskType::Trigger,
        _ => TaskType::Input,
    });
    let attr = task.data.unwrap_or(match task_type {
        TaskType::Trigger => {
            DataAttribute::with_property(DataType::Method, Property::Method(MethodKind::Direct))
        }
        _ => DataAttribute::new(DataType::String),
    });
    map_attribute_to_aic(&attr, task_type)
}
