//! Task models and interaction logs shipped with the crate.

use crate::task_model::{parse_task_model, TaskModel};

pub const FIG4_XML: &str = include_str!("../fixtures/fig4.xml");
pub const EXAMPLE1_XML: &str = include_str!("../fixtures/example1.xml");
pub const APPENDIX_XML: &str = include_str!("../fixtures/appendix.xml");
pub const BANK_TRANSFER_XML: &str = include_str!("../fixtures/bank-transfer.xml");
pub const CAR_RENTAL_XML: &str = include_str!("../fixtures/car-rental.xml");

pub const FIG2A_LOG: &str = include_str!("../fixtures/fig2a.log");
pub const FIG2B_LOG: &str = include_str!("../fixtures/fig2b.log");
pub const FIG2C_LOG: &str = include_str!("../fixtures/fig2c.log");
pub const FIG2D_LOG: &str = include_str!("../fixtures/fig2d.log");
pub const FIG5_LOG: &str = include_str!("../fixtures/fig5.log");
pub const BANK_TRANSFER_LOG: &str = include_str!("../fixtures/bank-transfer.log");
pub const CAR_RENTAL_LOG: &str = include_str!("../fixtures/car-rental.log");
pub const CAR_RENTAL_SECOND_USER_LOG: &str = include_str!("../fixtures/car-rental-second-user.log");

fn load(xml: &str) -> TaskModel {
    parse_task_model(xml).expect("bundled fixture parses")
}

pub fn fig4() -> TaskModel {
    load(FIG4_XML)
}

pub fn example1() -> TaskModel {
    load(EXAMPLE1_XML)
}

pub fn appendix() -> TaskModel {
    load(APPENDIX_XML)
}

pub fn bank_transfer() -> TaskModel {
    load(BANK_TRANSFER_XML)
}

pub fn car_rental() -> TaskModel {
    load(CAR_RENTAL_XML)
}

/// Every bundled model, by name.
pub fn all_models() -> Vec<TaskModel> {
    vec![
        fig4(),
        example1(),
        appendix(),
        bank_transfer(),
        car_rental(),
    ]
}
