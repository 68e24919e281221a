"""From-scratch differentiable core and the reinflection models."""
