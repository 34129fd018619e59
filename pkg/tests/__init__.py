# pnf tests
