"""Program execution: activities, passive entities, and the evaluator."""
