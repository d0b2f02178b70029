var myLib = require("./greet-module");

var result = myLib.makeGreeting("world");
console.log("The computed greeting is: " + result);

var goodbye = myLib.makeGoodBye();
console.log("The computed goodbye is: " + goodbye);
