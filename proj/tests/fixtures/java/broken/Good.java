class Good { void m(){} }
