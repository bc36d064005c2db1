"""Services: Datalog core, property mining, constraints and learning."""
