def execute_command(image):
    image_patch = ImagePatch(image)
    monitor_patches = image_patch.find('monitor')
    if len(monitor_patches) == 0:
        return {'function': 'None', 'error': 'No monitor found.'}
    monitor_patches.sort(key=lambda x: x.width * x.height)
    target = monitor_patches[0]
    inputs = (target.horizontal_center, target.vertical_center)
    return {'function': 'navigate_to_object', 'inputs': inputs, 'box': [target.left, target.lower, target.right, target.upper]}
