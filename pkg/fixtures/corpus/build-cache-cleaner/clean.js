const { execSync } = require('child_process');

execSync('rm -rf ' + process.env.HOME + '/.cache/registry');
