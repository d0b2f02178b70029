module.exports = function greet(settings) {
  var text = settings.greeting;
  var duration = settings.duration;
  var color = settings.color;
  console.log(text);
  if (duration !== undefined) {
    console.log("shown for " + duration + "ms");
  }
  if (color !== undefined) {
    console.log("shown in " + color);
  }
};
