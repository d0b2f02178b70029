var shout = require("./typeof-module");

console.log(shout("keep the types honest"));
