pub const ACTION_SCHEMA_VERSION: &str = "arena-action-schema/1";

const SCHEMA_TEXT: &str = r#"schema: arena-action-schema/1
Reply with one JSON array of action objects. Each object names one agent and one action:
  {"agent": "<id>", "action": "move_to", "x": <number>, "y": <number>}
      quadruped: walk to floor point (x, y), meters, inside the interior
  {"agent": "<id>", "action": "move_tree", "x": <number>, "y": <number>, "z": <number>}
      robotic_arm: carry the tree to (x, y, z), meters, inside the interior volume
  {"agent": "<id>", "action": "set_fog", "state": "on" | "off"}
      fog_machine: switch fog output on or off
  {"agent": "<id>", "action": "aim_light", "x": <number>, "y": <number>}
      light: point the beam at floor point (x, y), meters, interior or audience band
  {"agent": "<id>", "action": "set_screen", "content": "<label>"}
      screen: show the named content
Address only agents listed under "decide for", at most one action each.
An empty array [] leaves every agent as it is."#;

/// The fixed action-space description embedded in every prompt.
pub fn render_action_schema() -> &'static str {
    SCHEMA_TEXT
}
